"""Exception hierarchy.

Every error carries the data needed to build the CLI's machine-readable
error object (see ``details``).
"""


class TrifunError(Exception):
    """Base class for all library errors."""

    def details(self):
        return {}


class DimensionMismatch(TrifunError, ValueError):
    pass


class NotTriangular(TrifunError, ValueError):
    """Raised when a dense matrix has entries on the wrong side of the diagonal."""

    def __init__(self, max_modulus, position):
        self.max_modulus = float(max_modulus)
        self.position = tuple(int(p) for p in position)
        super().__init__(
            f"matrix is not triangular: |entry| = {self.max_modulus:g} at "
            f"row {self.position[0] + 1}, column {self.position[1] + 1}"
        )

    def details(self):
        return {"max_modulus": self.max_modulus, "position": [p + 1 for p in self.position]}


class DegenerateSpectrum(TrifunError, ValueError):
    """Two diagonal entries are too close for the gap divisions to be safe.

    ``pair`` holds zero-based diagonal positions.
    """

    def __init__(self, pair, gap, threshold):
        self.pair = tuple(int(i) for i in pair)
        self.gap = float(gap)
        self.threshold = float(threshold)
        super().__init__(
            f"diagonal entries {self.pair[0] + 1} and {self.pair[1] + 1} are separated "
            f"by {self.gap:g}, not above threshold {self.threshold:g}"
        )

    def details(self):
        return {"pair": [i + 1 for i in self.pair], "gap": self.gap, "threshold": self.threshold}


def _show(value):
    z = complex(value)
    return f"{z.real:g}" if z.imag == 0 else f"{z.real:g}{z.imag:+g}j"


class DomainViolation(TrifunError, ValueError):
    """A scalar function is not defined at one of the eigenvalues."""

    def __init__(self, function, index, value, reason=""):
        self.function = function
        self.index = None if index is None else int(index)
        self.value = value
        msg = f"{function} is not defined at eigenvalue {_show(value)}"
        if index is not None:
            msg += f" (diagonal entry {self.index + 1})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)

    def details(self):
        value = complex(self.value)
        out = {"function": self.function, "value": [value.real, value.imag]}
        if self.index is not None:
            out["index"] = self.index + 1
        return out


class NonPositiveDiagonal(TrifunError, ValueError):
    def __init__(self, index, value):
        self.index = int(index)
        self.value = float(value)
        super().__init__(
            f"diagonal entry {self.index + 1} is {self.value:g}; a unique real "
            "logarithm needs positive diagonal entries"
        )

    def details(self):
        return {"index": self.index + 1, "value": self.value}


class NotConverged(TrifunError, ArithmeticError):
    def __init__(self, terms, last_term_norm):
        self.terms = int(terms)
        self.last_term_norm = float(last_term_norm)
        super().__init__(
            f"series did not converge after {self.terms} terms "
            f"(last term max-norm {self.last_term_norm:g})"
        )

    def details(self):
        return {"terms": self.terms, "last_term_norm": self.last_term_norm}


class SpectralRadiusTooLarge(TrifunError, ValueError):
    def __init__(self, bound):
        self.bound = float(bound)
        super().__init__(f"spectral radius bound {self.bound:g} is not below 1")

    def details(self):
        return {"bound": self.bound}


class EigenvalueOnCut(TrifunError, ValueError):
    def __init__(self, index, value):
        self.index = int(index)
        self.value = value
        super().__init__(
            f"eigenvalue {_show(value)} of P - I (entry {self.index + 1}) lies on (-inf, -1]"
        )

    def details(self):
        value = complex(self.value)
        return {"index": self.index + 1, "value": [value.real, value.imag]}


class SingularResolvent(TrifunError, ArithmeticError):
    def __init__(self, node, index):
        self.node = float(node)
        self.index = int(index)
        super().__init__(
            f"resolvent is singular at quadrature node {self.node:g} (entry {self.index + 1})"
        )

    def details(self):
        return {"node": self.node, "index": self.index + 1}
