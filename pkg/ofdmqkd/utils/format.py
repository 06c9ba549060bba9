import enum
import json
import traceback
from typing import Any

import numpy as np


class CustomJSONEncoder(json.JSONEncoder):
    def default(self, o: Any) -> Any:  # pylint: disable=method-hidden

        if isinstance(o, enum.Enum):
            return o.value
        elif isinstance(o, np.integer):
            return int(o)
        elif isinstance(o, np.floating):
            return float(o)
        elif isinstance(o, np.bool_):
            return bool(o)
        elif isinstance(o, np.ndarray):
            return o.tolist()
        elif hasattr(o, 'serialize'):
            return o.serialize
        elif isinstance(o, Exception):
            return traceback.format_exception_only(o.__class__, o)
        else:
            return json.JSONEncoder.default(self, o)


def custom_json_dumps(obj: object, indent: int = None) -> str:
    return json.dumps(obj, cls=CustomJSONEncoder, sort_keys=True, indent=indent, allow_nan=False)
