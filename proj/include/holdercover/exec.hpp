#pragma once

namespace holdercover {

/// Selects the serial reference loop or the OpenMP kernel for the hot paths.
/// Both produce bit-identical results; tests hold them against each other.
enum class Exec { serial, parallel };

/// Bounds the OpenMP worker count (no-op when jobs <= 0).
void set_worker_count(int jobs);
int worker_count();

}  // namespace holdercover
