"""Error taxonomy. Every error carries a stable machine-readable code."""


class F1Error(Exception):
    code = "F1Error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_dict(self):
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


def _make(name, doc):
    cls = type(name, (F1Error,), {"code": name, "__doc__": doc})
    return cls


NotCancellative = _make("NotCancellative", "Operation needs a cancellative monoid.")
NonCommutative = _make("NonCommutative", "Operation needs a commutative monoid.")
InvalidMonoid = _make("InvalidMonoid", "Table or generator data is not a pointed monoid.")
InvalidLocalization = _make("InvalidLocalization", "Localization data is malformed.")
NotComposable = _make("NotComposable", "Domain/codomain mismatch.")
SupportViolation = _make("SupportViolation", "Monomial model used over a non-pc monoid.")
UnsupportedMorphism = _make("UnsupportedMorphism", "Morphism is not monomial.")
NotAConflation = _make("NotAConflation", "Pair is not a conflation.")
NotReversible = _make("NotReversible", "Normal dual needs a right reversible rpc monoid.")
UnsupportedBase = _make("UnsupportedBase", "Base monoid backend not supported here.")
UnsupportedModel = _make("UnsupportedModel", "Scheme data model not supported here.")
InvalidCocycle = _make("InvalidCocycle", "Transition data violates the cocycle condition.")
SchemeMismatch = _make("SchemeMismatch", "Bundles live on different schemes.")
SizeMismatch = _make("SizeMismatch", "Ranks or sizes do not match.")
NotIntegral = _make("NotIntegral", "Operation needs an integral scheme.")
InvalidForm = _make("InvalidForm", "Matrix is not a symmetric form.")
InvalidDuality = _make("InvalidDuality", "Involution/epsilon data is invalid.")
NotIsotropic = _make("NotIsotropic", "Index set is not isotropic.")
InfiniteUnits = _make("InfiniteUnits", "Unit group is infinite.")
InvalidBundle = _make("InvalidBundle", "Bundle failed validation.")
IsoFailure = _make("IsoFailure", "Projective bundle isomorphism check failed.")
CheckFailure = _make("CheckFailure", "Verification check failed.")
DescriptorMismatch = _make("DescriptorMismatch", "Finitely supported maps over different index sets.")
InfiniteIndex = _make("InfiniteIndex", "Index set cannot be enumerated.")
ParseError = _make("ParseError", "Input could not be parsed.")
