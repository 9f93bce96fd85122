""" Utilities

Some helper functions shared by the simulator, the agents and the harness.

Functions
---------
get_seed
    Grab the global seed
set_seed
    Set the global seed
get_rng
    Get a numpy generator for a named random stream derived from the seed
import_yaml
    Import a YAML file
import_json
    Import a JSON file
write_atomic
    Write a text file by replacing it in one step
pint_check
    Check the dimensionality of a pint quantity
to_magnitude
    Convert a settings value/units pair or quantity to a plain float
"""

import json
import os
import tempfile
import zlib
from random import randint

import numpy as np
import pint
import yaml

seed = None
tolerance = 1e-6


def get_seed() -> int:
    global seed
    if seed is None:
        set_seed(None)
    return(seed)


def set_seed(new_seed: int) -> None:
    if new_seed is None:
        new_seed = randint(1, int(1e6))
    elif type(new_seed) != int:
        raise TypeError("Seed must be a positive integer")
    elif new_seed <= 0:
        raise ValueError("Seed must be a positive integer")
    global seed
    seed = new_seed


def get_rng(stream: str, base_seed: int = None) -> np.random.Generator:
    """ Independent generator for one named consumer of randomness

    The same (seed, stream) pair always yields the same sequence, and
    different streams never share state.
    """
    if base_seed is None:
        base_seed = get_seed()
    key = zlib.crc32(stream.encode("utf-8"))
    return(np.random.default_rng([base_seed, key]))


def dict_to_lowercase(dictionary: dict) -> dict:
    """ Changes all keys of a dictionary to lowercase """
    for key, val in dictionary.items():
        if type(val) is dict:
            dict_to_lowercase(val)
        if key != key.lower():
            dictionary.pop(key)
            dictionary[key.lower()] = val
            dict_to_lowercase(dictionary)
            break
    return(dictionary)


def import_yaml(path: str) -> dict:
    """
    Opens a yaml file given the path and returns a dictionary
    object containing the yaml properties.
    """
    try:
        with open(path, 'r') as stream:
            yaml_object = yaml.load(stream, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        raise RuntimeError(f"File '{path}' could not be parsed: {e}")
    if yaml_object is None:
        yaml_object = {}
    if not isinstance(yaml_object, dict):
        raise RuntimeError(f"File '{path}' must contain a mapping at its top "
                           f"level")
    dict_to_lowercase(yaml_object)
    return(yaml_object)


def import_json(path: str):
    """ Opens a json file, raising a RuntimeError naming it on bad input """
    try:
        with open(path, 'r') as stream:
            return(json.load(stream))
    except json.JSONDecodeError as e:
        raise RuntimeError(f"File '{path}' could not be parsed: {e}")


def write_atomic(path: str, text: str) -> None:
    """ Write text to path so readers never see a partial file """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def merge_dicts(base: dict, override: dict) -> dict:
    """ Recursively merge override into a copy of base """
    merged = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_dicts(merged[key], val)
        else:
            merged[key] = val
    return(merged)


def pint_check(value, expected_units, no_errors: bool = False) -> bool:
    """ Error checking for a pint object

    expected_units is the dimensionality and should include the brackets, for
    example to check that a value passed is a velocity, you could pass
    '[length] / [time]' or '[velocity]'
    If no_errors has been set as True, the function will return a False value
    rather than raising an error.
    """
    if not isinstance(value, pint.Quantity):
        if no_errors:
            return(False)
        raise TypeError(f"Expected a pint Quantity object, "
                        f"got a {type(value)} instead")
    elif not value.check(expected_units):
        if no_errors:
            return(False)
        raise TypeError(f"Expected dimensionality of {expected_units}, got "
                        f"{value.dimensionality} instead")
    return(True)


def to_magnitude(value, expected_units: str, base_units: str) -> float:
    """ Plain float in base_units from a settings entry

    Accepts a {value, units} mapping as written in the settings files, a
    pint Quantity, or a bare number which is taken to be in base_units.
    """
    if isinstance(value, dict):
        try:
            value = pint.Quantity(value["value"], value["units"])
        except KeyError:
            raise ValueError(f"Expected a value/units pair, got {value}")
    if isinstance(value, pint.Quantity):
        pint_check(value, expected_units)
        return(float(value.to(base_units).magnitude))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"Expected a numeric or pint Quantity value, "
                        f"got a {type(value)} instead")
    return(float(value))
