#pragma once

// The library is compiled twice: once with 32-bit scalars for training and
// inference, once with SWINTRACK_DOUBLE for finite-difference gradient checks.
// Each build lives in its own inline namespace so both can be linked into the
// same executable.

#if defined(SWINTRACK_DOUBLE)
#define SWINTRACK_PRECISION_NS f64
#else
#define SWINTRACK_PRECISION_NS f32
#endif

namespace swintrack::inline SWINTRACK_PRECISION_NS {

#if defined(SWINTRACK_DOUBLE)
using Scalar = double;
#else
using Scalar = float;
#endif

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
