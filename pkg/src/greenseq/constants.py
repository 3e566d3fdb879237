# Checked integer range for exchange matrices, c- and g-vectors
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# Classification tags as they appear in reports
TAG_ACYCLIC = "acyclic"
TAG_A = "A"
TAG_D_I = "D_I"
TAG_D_II = "D_II"
TAG_D_III = "D_III"
TAG_D_IV = "D_IV"
TAG_AFFINE = "affine_A"
TAG_UNKNOWN = "unknown"

# Tagged arc ends at the puncture
PLAIN = "plain"
NOTCHED = "notched"

# Construction stage names used in invariant reports
STAGES_TYPE_IV = ("i1", "i2", "i3", "i4", "i5")

# Exit codes of the command line
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2

DEFAULT_DOT_GRAPH_NAME = "exchange_graph"
