#pragma once

// A finite search scope: the sizes of the context, individual and world
// universes.  All components are >= 1.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace deonmf {

struct Scope {
  int nc = 1;  // contexts
  int ne = 1;  // individuals
  int nw = 1;  // worlds

  Scope() = default;
  Scope(int c, int e, int w) : nc(c), ne(e), nw(w) {
    if (c < 1 || e < 1 || w < 1) {
      throw std::invalid_argument("scope components must be >= 1");
    }
  }

  bool operator==(const Scope& o) const {
    return nc == o.nc && ne == o.ne && nw == o.nw;
  }
  bool operator!=(const Scope& o) const { return !(*this == o); }
  bool leq(const Scope& o) const {
    return nc <= o.nc && ne <= o.ne && nw <= o.nw;
  }

  std::string to_string() const {
    return "c=" + std::to_string(nc) + ",e=" + std::to_string(ne) +
           ",w=" + std::to_string(nw);
  }
};

}  // namespace deonmf
