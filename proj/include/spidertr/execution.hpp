#pragma once

namespace spidertr {

/// Selects the OpenMP kernel or its single-threaded twin. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Exec { Serial, Parallel };

}  // namespace spidertr
