"""Pass/fail bookkeeping shared by the verifiers."""

from fractions import Fraction


class Check:
    __slots__ = ("name", "passed", "witness", "count")

    def __init__(self, name, passed=True, witness=None, count=0):
        self.name = name
        self.passed = passed
        self.witness = witness
        self.count = count

    def to_dict(self):
        d = {"name": self.name, "passed": self.passed, "cases": self.count}
        if self.witness is not None:
            d["witness"] = jsonable(self.witness)
        return d

    def __repr__(self):
        return "Check(%s, %s)" % (self.name, "pass" if self.passed else "FAIL")


class Report:
    """Ordered list of named checks."""

    def __init__(self, title=""):
        self.title = title
        self.checks = []

    def add(self, name, passed, witness=None, count=0):
        c = Check(name, bool(passed), witness, count)
        self.checks.append(c)
        return c

    def start(self, name):
        """Open a check that records the first failing case it is shown."""
        c = Check(name)
        self.checks.append(c)
        return c

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.witness, c.count))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {"title": self.title, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}

    def __repr__(self):
        bad = [c.name for c in self.failures()]
        return "Report(%s: %d checks, failed=%s)" % (self.title, len(self.checks), bad)


def record(check, ok, witness):
    """Count a case; keep only the first failing witness."""
    check.count += 1
    if not ok and check.passed:
        check.passed = False
        check.witness = witness
    return ok


def jsonable(x):
    from .super_core import fmt
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_str"):
        return x.to_str()
    return str(x)
