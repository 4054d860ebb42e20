#ifndef WAVEPACK_SRC_PACKET_EVAL_HPP
#define WAVEPACK_SRC_PACKET_EVAL_HPP

#include "wavepack/packets.hpp"

namespace wp::detail {

void local_coords(const PacketFrame& fr, const SphereState& s, double y1, double y2, double z[2]);
// A sum_zeta h(zeta) e^{i xi.z} (times i lam / <omega, xi> for psi), no 1/a0
cplx window_sum(const PacketFrame& fr, const PacketWindow& w, const double z[2], Generator gen,
                std::vector<cplx>& e1, std::vector<cplx>& e2);

}  // namespace wp::detail

#endif
