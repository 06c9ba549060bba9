from typing import Any, Dict, List


def merge(dict1, dict2):
    """
    Merge two dictionaries.
    :param dict1:
    :param dict2:
    :return:
    """
    for k in dict2:
        if k in dict1 and isinstance(dict1[k], dict) and isinstance(dict2[k], dict):
            merge(dict1[k], dict2[k])
        else:
            dict1[k] = dict2[k]


def unknown_keys(template: Dict[str, Any], document: Dict[str, Any], prefix: str = '') -> List[str]:
    """
    List keys of document that do not appear in template, as dotted paths.
    Nested dicts in the template are checked recursively.
    """
    unknown = []
    for k, v in document.items():
        path = f'{prefix}{k}'
        if k not in template:
            unknown.append(path)
        elif isinstance(template[k], dict) and isinstance(v, dict):
            unknown.extend(unknown_keys(template[k], v, prefix=f'{path}.'))
    return unknown
