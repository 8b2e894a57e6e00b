"""Global numeric tolerance and size guards for exhaustive enumeration."""

# Absolute tolerance for exact verdicts.  Exact enumeration over dyadic edge
# probabilities is correct to accumulated rounding only, so inequality slacks
# are compared against this rather than 0.
DEFAULT_TOL = 1e-12

# Exhaustive-enumeration caps.  These bound what the exact engine will even
# attempt; they are not performance promises at the cap.
MAX_EXACT_EDGES = 24       # 2^E configurations
MAX_PAIR_EDGES = 12        # 4^E configuration pairs
MAX_SPLICE_EDGES = 10      # joint-law table over pairs of configurations
MAX_CONTINUATION_EDGES = 16
MAX_WITNESS_OPEN = 24      # 2^k witness splits in disjoint-occurrence checks
MAX_ZIPPER_STATES = 10**6  # product of per-edge symbol-set sizes
