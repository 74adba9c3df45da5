#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from .core import Record, registry, to_key
from .check import listof
import configparser
import weakref
import yaml


class Location(object):
    """Position of a record in the YAML document."""

    def __init__(self, filename, line):
        self.filename = filename
        self.line = line

    def __str__(self):
        return "\"%s\", line %s" % (self.filename, self.line)


class LocationRef(weakref.ref):
    # Weak reference from a record to its location.

    __slots__ = ('oid', 'location')

    oid_to_ref = {}

    @staticmethod
    def cleanup(ref, oid_to_ref=oid_to_ref):
        del oid_to_ref[ref.oid]

    def __new__(cls, record, location):
        self = super(LocationRef, cls).__new__(cls, record, cls.cleanup)
        self.oid = id(record)
        self.location = location
        cls.oid_to_ref[self.oid] = self
        return self

    def __init__(self, record, location):
        super(LocationRef, self).__init__(record, self.cleanup)

    @classmethod
    def locate(cls, record):
        """Finds the record location."""
        ref = cls.oid_to_ref.get(id(record))
        if ref is not None:
            return ref.location

    @classmethod
    def set_location(cls, record, location):
        # Associates a record with its location.
        cls(record, location)
        return record


set_location = LocationRef.set_location
locate = LocationRef.locate


# Use fast LibYAML-based loader when available.
try:
    BaseYAMLLoader = yaml.CSafeLoader
except AttributeError:
    BaseYAMLLoader = yaml.SafeLoader


class SuiteLoader(BaseYAMLLoader):
    # Reads a suite of experiment records from a YAML file.

    def __init__(self, record_types, stream):
        super(SuiteLoader, self).__init__(stream)
        # List of supported record types.
        self.record_types = record_types
        # Indicates that the next node is an experiment record.
        self.expect_record = None
        # Indicates that the next node is a sequence of records.
        self.expect_record_list = None

    def __call__(self):
        # Make sure the YAML stream contains one record and return it.
        self.expect_record = True
        self.expect_record_list = False
        return self.get_single_data()

    def construct_object(self, node, deep=False):
        # Generate a nicer error message when a record could not be found.
        if self.expect_record:
            if not (isinstance(node, yaml.MappingNode) and
                    node.tag == "tag:yaml.org,2002:map"):
                raise yaml.constructor.ConstructorError(None, None,
                        "expected an experiment record", node.start_mark)
        if self.expect_record_list:
            if not (isinstance(node, yaml.SequenceNode) and
                    node.tag == "tag:yaml.org,2002:seq"):
                raise yaml.constructor.ConstructorError(None, None,
                        "expected a sequence of experiment records",
                        node.start_mark)

        data = super(SuiteLoader, self).construct_object(node, deep=deep)

        if self.expect_record:
            if not isinstance(data, Record):
                raise yaml.constructor.ConstructorError(None, None,
                        "expected an experiment record", node.start_mark)

        return data

    def construct_yaml_str(self, node):
        # Always return a `!!str` node as a native string.
        return str(self.construct_scalar(node))

    def construct_yaml_seq(self, node):
        if not self.expect_record_list:
            return super(SuiteLoader, self).construct_yaml_seq(node)

        # Construct a list of records.
        self.expect_record = True
        self.expect_record_list = False
        data = []
        for item in node.value:
            data.append(self.construct_object(item, deep=True))
        self.expect_record = False
        self.expect_record_list = True
        return data

    def construct_yaml_map(self, node):
        if not self.expect_record:
            return super(SuiteLoader, self).construct_yaml_map(node)

        # Construct mapping keys.
        keys = []
        current_expect_record = self.expect_record
        self.expect_record = False
        for key_node, value_node in node.value:
            key = self.construct_object(key_node, deep=True)
            if not isinstance(key, str):
                raise yaml.constructor.ConstructorError(
                        "while constructing an experiment record",
                        node.start_mark,
                        "found invalid setting name", key_node.start_mark)
            keys.append(to_key(key))
        self.expect_record = current_expect_record

        # Find a record class matching the set of keys.
        detected_record_type = None
        for record_type in self.record_types:
            if record_type.__recognizes__(set(keys)):
                detected_record_type = record_type
                break
        if detected_record_type is None:
            if not keys:
                raise yaml.constructor.ConstructorError(None, None,
                        "expected an experiment record", node.start_mark)
            field_list = ", ".join(repr(key) for key in keys)
            raise yaml.constructor.ConstructorError(None, None,
                    "cannot find an experiment kind with %s %s"
                    % ("setting" if len(keys) == 1 else "settings",
                       field_list),
                    node.start_mark)

        # Construct the record values; nested records for suites.
        mapping = {}
        current_expect_record = self.expect_record
        for key, (key_node, value_node) in zip(keys, node.value):
            self.expect_record = False
            self.expect_record_list = False
            field = detected_record_type.__field__(key)
            if field is not None:
                if field.check is Record:
                    self.expect_record = True
                elif (isinstance(field.check, listof) and
                        field.check.item_check is Record):
                    self.expect_record_list = True
            value = self.construct_object(value_node, deep=True)
            mapping[key] = value
        self.expect_record = current_expect_record
        self.expect_record_list = False

        # Generate a record object.
        try:
            record = detected_record_type.__load__(mapping)
        except ValueError as exc:
            raise yaml.constructor.ConstructorError(None, None,
                    str(exc), node.start_mark)

        # Associate the record object with its position in the YAML stream.
        location = Location(node.start_mark.name, node.start_mark.line+1)
        set_location(record, location)

        return record


# Register custom constructors.
SuiteLoader.add_constructor(
        'tag:yaml.org,2002:str', SuiteLoader.construct_yaml_str)
SuiteLoader.add_constructor(
        'tag:yaml.org,2002:seq', SuiteLoader.construct_yaml_seq)
SuiteLoader.add_constructor(
        'tag:yaml.org,2002:map', SuiteLoader.construct_yaml_map)


def load(filename, record_types):
    """Loads an experiment record or a suite from a YAML file."""
    with open(filename, 'r') as stream:
        loader = SuiteLoader(record_types, stream)
        try:
            return loader()
        finally:
            loader.dispose()


SECTION = 'schrolab'


def read_config(path, section=SECTION):
    """
    Reads ``key = value`` lines into a mapping of raw strings.

    ``#`` starts a comment; keys are case sensitive.  With `section`,
    reads that section of an INI file (e.g. ``setup.cfg``) instead.
    """
    parser = configparser.ConfigParser(comment_prefixes=('#',),
                                       inline_comment_prefixes=('#',),
                                       interpolation=None)
    parser.optionxform = str
    try:
        with open(path, 'r') as stream:
            text = stream.read()
        if section == SECTION and not text.lstrip().startswith('['):
            text = "[%s]\n%s" % (SECTION, text)
        parser.read_string(text, source=path)
    except configparser.DuplicateOptionError as exc:
        raise ValueError("duplicate setting %r in %s" % (exc.option, path))
    except configparser.Error as exc:
        raise ValueError("ill-formed configuration file %s: %s"
                         % (path, exc))
    if not parser.has_section(section):
        return {}
    return dict((to_key(key), value)
                for key, value in parser.items(section))


def known_keys():
    # Every key some experiment kind understands.
    keys = set()
    for record_type in registry.input_types:
        keys.update(field.key for field in record_type.__fields__)
    return keys


def build_record(record_type, mapping):
    """
    Loads `record_type` from a mapping of layered settings.

    Keys understood only by other experiment kinds are ignored, so that a
    shared configuration file may serve every subcommand.
    """
    known = known_keys()
    values = {}
    for key, value in mapping.items():
        key = to_key(key)
        if record_type.__field__(key) is not None:
            values[key] = value
        elif key not in known:
            raise ValueError("unknown setting %r" % key)
    return record_type.__load__(values)


def load_config(path=None, overrides=None, record_type=None):
    """
    Resolves a configuration from a ``key = value`` file and overrides.

    Overrides win over file values; missing keys take their defaults.
    """
    if record_type is None:
        from .experiments import ExperimentConfig
        record_type = ExperimentConfig
    mapping = {}
    if path is not None:
        mapping.update(read_config(path))
    if overrides:
        mapping.update((to_key(key), value)
                       for key, value in overrides.items())
    return build_record(record_type, mapping)
