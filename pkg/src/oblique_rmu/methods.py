import enum


class Method(str, enum.Enum):
    """Solver identifiers. Declaration order is the ranking tie-break order."""

    RMU = "RMU"
    RCG = "RCG"
    EMU_PROJ = "EMU_PROJ"
    SPARSEMU_PROJ = "SPARSEMU_PROJ"

    @property
    def order(self):
        return list(Method).index(self)

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {"EMU": "EMU_PROJ", "SMU_L1": "SPARSEMU_PROJ", "SPARSEMU": "SPARSEMU_PROJ"}
        return cls(aliases.get(key, key))
