#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


class check(object):
    """Pseudo-type for ``isinstance()`` checks."""

    def __instancecheck__(self, data):
        return False

    def parse(self, text):
        """Converts a config string to a value of this type."""
        raise ValueError("cannot parse %r as %s" % (text, self.__name__))

    def coerce(self, data):
        """Normalizes an already typed value (e.g. from YAML)."""
        return data

    @property
    def __name__(self):
        return self.__class__.__name__

    def __repr__(self):
        return self.__name__


class real(check):
    """A real number; integers are accepted and converted."""

    def __instancecheck__(self, data):
        return (isinstance(data, (int, float)) and
                not isinstance(data, bool))

    def parse(self, text):
        try:
            return float(text)
        except ValueError:
            raise ValueError("expected a real number, got %r" % text)

    def coerce(self, data):
        return float(data)


class integer(check):
    """An integer (booleans excluded)."""

    def __instancecheck__(self, data):
        return (isinstance(data, int) and not isinstance(data, bool))

    def parse(self, text):
        try:
            return int(text)
        except ValueError:
            raise ValueError("expected an integer, got %r" % text)


class string(check):
    """A string."""

    def __instancecheck__(self, data):
        return isinstance(data, str)

    def parse(self, text):
        return text.strip()


class flag(check):
    """A boolean switch."""

    TRUE = ('1', 'yes', 'true', 'on')
    FALSE = ('0', 'no', 'false', 'off')

    def __instancecheck__(self, data):
        return isinstance(data, bool)

    def parse(self, text):
        value = text.strip().lower()
        if value in self.TRUE:
            return True
        if value in self.FALSE:
            return False
        raise ValueError("expected a boolean, got %r" % text)


class maybe(check):
    """The given type or ``None``."""

    def __init__(self, check):
        self.check = check

    def __instancecheck__(self, data):
        return (data is None or isinstance(data, self.check))

    def parse(self, text):
        if text.strip().lower() in ('', 'none'):
            return None
        return parse(self.check, text)

    def coerce(self, data):
        if data is None:
            return None
        return coerce(self.check, data)

    @property
    def __name__(self):
        return "maybe(%s)" % self.check.__name__


class choiceof(check):
    """A value from the given list of choices."""

    def __init__(self, values):
        self.values = values

    def __instancecheck__(self, data):
        return (data in self.values)

    def parse(self, text):
        return text.strip()

    @property
    def __name__(self):
        return "choiceof(%s)" % ", ".join(repr(value) for value in self.values)


class listof(check):
    """Non-empty list of items of the given type."""

    def __init__(self, item_check):
        self.item_check = item_check

    def __instancecheck__(self, data):
        return (isinstance(data, list) and len(data) > 0 and
                all(isinstance(item, self.item_check) for item in data))

    def parse(self, text):
        items = [item for item in text.split(',') if item.strip()]
        return [parse(self.item_check, item) for item in items]

    def coerce(self, data):
        return [coerce(self.item_check, item) for item in data]

    @property
    def __name__(self):
        return "listof(%s)" % self.item_check.__name__


def parse(type_, text):
    """Converts config text to a value of the given type."""
    if not isinstance(type_, check):
        return text
    return type_.parse(text)


def coerce(type_, data):
    """Normalizes a typed value to its canonical representation."""
    if not isinstance(type_, check):
        return data
    return type_.coerce(data)
