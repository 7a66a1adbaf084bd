#pragma once

// Reference implementations written independently of the library, used to
// cross-check it. Kept deliberately naive.

#include "vnflab/sim/types.hpp"

#include <algorithm>
#include <random>

namespace oracle {

// Quality as a fraction of the way from the lower resource corner to the
// upper one, mapped onto [qos_min, qos_max].
inline double qos(const vnflab::sim::VnfSpec& s, double u, double c, double m) {
  const double c_lo = s.c0 + s.cr * u - s.dc * u;
  const double c_hi = s.c0 + s.cr * u + s.dc * u;
  const double m_lo = s.m0 + s.mr * u - s.dm * u;
  const double m_hi = s.m0 + s.mr * u + s.dm * u;
  if (c > c_hi && m > m_hi) return s.qos_max;
  if (c < c_lo || m < m_lo) return 0.0;
  const double width = (c_hi - c_lo) + (m_hi - m_lo);
  if (width == 0.0) return s.qos_min;
  const double progress = (std::min(c, c_hi) - c_lo + std::min(m, m_hi) - m_lo) / width;
  return s.qos_min + progress * (s.qos_max - s.qos_min);
}

// A catalogue entry with coefficients drawn to satisfy the schema invariants.
template <typename Gen>
vnflab::sim::VnfSpec random_spec(Gen& g) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  vnflab::sim::VnfSpec s;
  s.c0 = 5 * unit(g);
  s.dc = 4 * unit(g);
  s.cr = s.dc + 0.1 + 4 * unit(g);
  s.m0 = 5 * unit(g);
  s.dm = 4 * unit(g);
  s.mr = s.dm + 0.1 + 4 * unit(g);
  s.qos_min = 60 * unit(g);
  s.qos_max = s.qos_min + 60 * unit(g);
  s.gamma_sla = 4 * unit(g);
  return s;
}

}  // namespace oracle
