"""JSON schemas of the documents pylufid reads and writes.

The definitions live in ``schemas.json`` next to this module:

- ``state``: a :class:`~pylufid.utils.states.DensityMatrix` or
  :class:`~pylufid.utils.states.PureState` in dict form
- ``optimization_report``, ``bound_report``, ``bound_suite``,
  ``distill_report`` and ``commutativity_report``: the ``to_dict`` forms of
  the matching report classes
- ``fidelity_summary`` and ``sdp_certificate``: the ``fidelity`` and
  ``sdp-export`` command outputs

Non-finite floats are written as ``null``.
"""
import json
from functools import lru_cache
from os import path

from jsonschema import Draft7Validator

from .exceptions import BadParameter, SchemaViolation

SCHEMA_FILE = path.join(path.dirname(path.abspath(__file__)), 'schemas.json')
DRAFT = 'http://json-schema.org/draft-07/schema#'


@lru_cache(maxsize=None)
def _definitions():

    with open(SCHEMA_FILE, encoding='utf-8') as f:
        return json.load(f)['definitions']


def schema_names():

    return sorted(_definitions())


def load_schema(name):
    """Standalone draft-07 schema for the document ``name``.

    Parameters
    ----------
    name : str
        One of :func:`schema_names`.

    Returns
    -------
    schema : dict
    """

    definitions = _definitions()
    if name not in definitions:
        raise BadParameter(f"unknown schema '{name}', expected one of {schema_names()}")

    return {'$schema': DRAFT,
            'allOf': [{'$ref': f'#/definitions/{name}'}],
            'definitions': definitions}


@lru_cache(maxsize=None)
def _validator(name):

    schema = load_schema(name)
    Draft7Validator.check_schema(schema)

    return Draft7Validator(schema)


def validate_document(document, name):
    """Raise :class:`SchemaViolation` unless ``document`` matches schema ``name``.

    Every violation is listed in the message, deepest path first.
    """

    errors = sorted(_validator(name).iter_errors(document),
                    key=lambda e: (-len(e.absolute_path), str(e.absolute_path)))
    if errors:
        where = '; '.join(f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}"
                          for e in errors[:5])
        raise SchemaViolation(f'document does not match schema {name!r}: {where}')

    return document
