#ifndef GRIDRESTORE_IDS_HPP
#define GRIDRESTORE_IDS_HPP

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>

namespace gridrestore {

/// Integer identifier tagged with the kind of element it names, so a bus id
/// cannot be passed where a generator id is expected.
template <typename Tag>
struct Id {
  int value = 0;

  constexpr Id() = default;
  constexpr explicit Id(int v) : value(v) {}

  friend constexpr auto operator<=>(const Id&, const Id&) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

struct BusTag {};
struct UnitTag {};
struct LoadTag {};

using BusId = Id<BusTag>;
using UnitId = Id<UnitTag>;
using LoadId = Id<LoadTag>;

}  // namespace gridrestore

template <typename Tag>
struct std::hash<gridrestore::Id<Tag>> {
  std::size_t operator()(gridrestore::Id<Tag> id) const noexcept {
    return std::hash<int>{}(id.value);
  }
};

#endif  // GRIDRESTORE_IDS_HPP
