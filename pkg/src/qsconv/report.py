"""Structured pass/fail reports used by the verification pipelines and the CLI."""

from dataclasses import dataclass, field


@dataclass
class Check:
    """A single named residual compared against a tolerance."""

    name: str
    residual: float
    tol: float
    passed: bool
    note: str = ""

    @classmethod
    def from_residual(cls, name, residual, tol, note=""):
        residual = float(residual)
        return cls(name, residual, float(tol), residual <= tol, note)

    @classmethod
    def from_flag(cls, name, passed, residual=0.0, tol=0.0, note=""):
        return cls(name, float(residual), float(tol), bool(passed), note)

    def to_dict(self):
        d = {
            "name": self.name,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
        }
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class Report:
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, check):
        self.checks.append(check)
        return check

    def add_residual(self, name, residual, tol, note=""):
        return self.add(Check.from_residual(name, residual, tol, note))

    def add_flag(self, name, passed, residual=0.0, tol=0.0, note=""):
        return self.add(Check.from_flag(name, passed, residual, tol, note))

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.add(Check(prefix + c.name, c.residual, c.tol, c.passed, c.note))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def residual(self, name):
        for c in self.checks:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def max_residual(self):
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self):
        d = {"checks": [c.to_dict() for c in self.checks], "pass": self.passed}
        meta = {}
        for k, v in self.meta.items():
            if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
                meta[k] = v
            elif isinstance(v, float) or hasattr(v, "item"):
                meta[k] = float(v)
        if meta:
            d["meta"] = meta
        return d

    def summary(self):
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name}: residual={c.residual:.3e} tol={c.tol:.1e}")
        lines.append("overall: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)
