#ifndef GRIDRESTORE_LOAD_HPP
#define GRIDRESTORE_LOAD_HPP

#include "gridrestore/ids.hpp"

namespace gridrestore {

/// A restorable load. `p` doubles as the capacity C of the load in the
/// compound score; `alpha` is its importance in [0, 1].
struct LoadPoint {
  LoadId id;
  BusId bus;
  double p = 0.0;  // MW
  double q = 0.0;  // MVar
  double alpha = 0.0;
  double k_lp = 0.0;  // MW per Hz
  double k_lq = 0.0;  // MVar per Hz
  bool connected = false;
};

}  // namespace gridrestore

#endif  // GRIDRESTORE_LOAD_HPP
