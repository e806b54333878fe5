#pragma once

namespace kdvlab {

/// KdV (first Hamiltonian) or KdV2 (second Hamiltonian) flow.
enum class Model { kdv, kdv2 };

}  // namespace kdvlab
