from strenum import StrEnum


class Protocol(StrEnum):

    QPSK = 'qpsk'
    QAM = 'qam'
    Gaussian = 'gaussian'

    @classmethod
    def from_name(cls, name: str) -> 'Protocol':
        key = str(name).lower().replace('-', '').replace('_', '')
        aliases = {
            'qpsk': cls.QPSK,
            'qam': cls.QAM,
            '256qam': cls.QAM,
            'qam256': cls.QAM,
            'gaussian': cls.Gaussian,
            'gauss': cls.Gaussian,
            'gg02': cls.Gaussian
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"Unknown protocol '{name}'")


class FourthMomentConvention(StrEnum):

    RawFourthMoment = 'raw'
    VarianceOfSquare = 'variance-of-square'


class TupleCounting(StrEnum):

    Ordered = 'ordered'
    Unordered = 'unordered'


class DistinctnessRule(StrEnum):

    Strict = 'strict'  # M: m != n; W: pairwise distinct and none equal to k
    Pairwise = 'pairwise'  # M: m != n; W: pairwise distinct
    ExcludeK = 'exclude-k'  # as strict, and M indices also differ from k


class Detection(StrEnum):

    Homodyne = 'homodyne'
    HeterodyneNoSwitch = 'heterodyne'


class Backend(StrEnum):

    Gaussian = 'gaussian'
    GaussianEquivalent = 'gaussian-equivalent'


class OutputFormat(StrEnum):

    CSV = 'csv'
    JSON = 'json'


class Study(StrEnum):

    RatioVsMu = 'ratio-vs-mu'
    NoiseVsN = 'noise-vs-n'
    SkrVsDistance = 'skr-vs-distance'
    Gain = 'gain'
    OptimalN = 'optimal-n'


class MixingVariance(StrEnum):

    Coherent = 'coherent'  # squared tuple counts, products of one type add in amplitude
    Independent = 'independent'  # every distinct product adds in power, plus self compression
