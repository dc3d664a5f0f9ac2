"""Verification reports and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .series import QSeries, rational_str

HEAD = 8


@dataclass
class IdentityReport:
    identity_id: str
    order: int
    status: str
    first_mismatch: int | None
    residual: QSeries
    matched_correction: str | None = None
    t_index: int | None = None  # for two-variable identities: failing power of t
    notes: list = field(default_factory=list)

    @classmethod
    def compare(cls, identity_id: str, lhs: QSeries, rhs: QSeries, order: int, **kw) -> "IdentityReport":
        return cls.from_residual(identity_id, (lhs - rhs).truncate(order), order, **kw)

    @classmethod
    def from_residual(cls, identity_id: str, residual: QSeries, order: int, **kw) -> "IdentityReport":
        v = residual.valuation()
        return cls(identity_id, order, "pass" if v is None else "fail", v, residual, **kw)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def residual_head(self, n: int = HEAD) -> list[str]:
        raw = self.residual.raw()
        return [rational_str(raw[i]) if i < len(raw) else "0" for i in range(n)]

    def to_json(self) -> dict:
        return {
            "id": self.identity_id,
            "order": self.order,
            "status": self.status,
            "first_mismatch": self.first_mismatch,
            "residual": self.residual_head(),
            "correction": self.matched_correction,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    def summary(self) -> str:
        line = f"{self.identity_id} (order {self.order}): {self.status}"
        if not self.passed:
            line += f", first mismatch q^{self.first_mismatch}"
            if self.t_index is not None:
                line += f" in the t^{self.t_index} coefficient"
            line += f", residual head [{', '.join(self.residual_head())}]"
        if self.matched_correction:
            line += f"; correction: {self.matched_correction}"
        return line
