"""Exception types raised by dfmorder.

Every error carries a short ``kind`` tag so that the command line layer can
map it to an exit status and a one-line diagnostic.
"""


class DfmOrderError(Exception):
    kind = "Error"


class PanelError(DfmOrderError, ValueError):
    kind = "PanelError"


class EmptyInput(PanelError):
    kind = "EmptyInput"


class RaggedRows(PanelError):
    kind = "RaggedRows"

    def __init__(self, row, expected, got):
        self.row = row
        self.expected = expected
        self.got = got
        super().__init__(f"row {row} has {got} entries, expected {expected}")


class NonFinite(PanelError):
    kind = "NonFinite"

    def __init__(self, cells):
        # cells: list of (row, col), 0-based
        self.cells = list(cells)
        self.row, self.col = self.cells[0]
        shown = ", ".join(f"({r}, {c})" for r, c in self.cells[:10])
        more = "" if len(self.cells) <= 10 else f" and {len(self.cells) - 10} more"
        super().__init__(f"non-finite entries at {shown}{more}")


class InsufficientColumns(PanelError):
    kind = "InsufficientColumns"


class ConvergenceFailure(DfmOrderError, ArithmeticError):
    kind = "ConvergenceFailure"


class InsideSupport(DfmOrderError, ValueError):
    """Argument lies inside the support of the limiting law."""

    kind = "InsideSupport"


class CEqualsOne(DfmOrderError, ValueError):
    kind = "CEqualsOne"


class NonPositiveLambda(DfmOrderError, ValueError):
    kind = "NonPositiveLambda"


class EmptyWindow(DfmOrderError, ValueError):
    kind = "EmptyWindow"


class AspectRatioOne(DfmOrderError, ValueError):
    kind = "AspectRatioOne"
