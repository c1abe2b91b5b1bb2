#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "collapselab/complexity/bdm.hpp"
#include "collapselab/errors.hpp"

namespace collapselab {

// A syntactic perturbation of a symbol string.
struct Perturbation {
  enum class Kind { flip, delete_block, substitute };

  Kind kind = Kind::flip;
  std::size_t position = 0;
  std::size_t length = 0;   // delete_block only
  char symbol = '0';        // substitute only

  static Perturbation flip(std::size_t position) {
    return {Kind::flip, position, 0, '0'};
  }
  static Perturbation delete_block(std::size_t position, std::size_t length) {
    return {Kind::delete_block, position, length, '0'};
  }
  static Perturbation substitute(std::size_t position, char symbol) {
    return {Kind::substitute, position, 0, symbol};
  }

  std::string apply(const std::string& object) const {
    switch (kind) {
      case Kind::flip: {
        if (position >= object.size())
          throw InvariantError("perturbation: flip position out of bounds");
        const char c = object[position];
        if (c != '0' && c != '1')
          throw InvariantError("perturbation: flip requires a binary symbol");
        std::string out = object;
        out[position] = (c == '0') ? '1' : '0';
        return out;
      }
      case Kind::delete_block: {
        if (length == 0)
          throw InvariantError("perturbation: delete length must be >= 1");
        if (position + length > object.size())
          throw InvariantError("perturbation: delete block out of bounds");
        std::string out = object;
        out.erase(position, length);
        if (out.empty())
          throw InvariantError("perturbation: delete empties the object");
        return out;
      }
      case Kind::substitute: {
        if (position >= object.size())
          throw InvariantError("perturbation: substitute position out of bounds");
        std::string out = object;
        out[position] = symbol;
        return out;
      }
    }
    throw InvariantError("perturbation: unknown kind");
  }

  bool invertible() const { return kind != Kind::delete_block; }

  // The perturbation mapping apply(object) back to object.
  Perturbation inverse_on(const std::string& object) const {
    switch (kind) {
      case Kind::flip:
        return *this;
      case Kind::substitute:
        if (position >= object.size())
          throw InvariantError("perturbation: substitute position out of bounds");
        return substitute(position, object[position]);
      case Kind::delete_block:
        throw InvariantError("perturbation: delete_block is not invertible");
    }
    throw InvariantError("perturbation: unknown kind");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::flip:
        return "flip@" + std::to_string(position);
      case Kind::delete_block:
        return "del@" + std::to_string(position) + "+" + std::to_string(length);
      case Kind::substitute:
        return "sub@" + std::to_string(position) + "=" + std::string(1, symbol);
    }
    return "?";
  }
};

// Delta_tau(o) = BDM(tau(o)) - BDM(o), signed bits.
inline double aid_delta(const std::string& object, const Perturbation& tau,
                        const BdmConfig& cfg,
                        const OutputFrequencyTable& table) {
  const std::string perturbed = tau.apply(object);
  return bdm(perturbed, cfg, table).value_bits -
         bdm(object, cfg, table).value_bits;
}

struct RankedPerturbation {
  Perturbation tau;
  double delta_bits = 0.0;
};

// Grammar for the CLI: items separated by ';', each one of
//   flip@P | flip@all | sub@P=S | del@P+L
// with P an index into the object, S a symbol character, L a length.
inline std::vector<Perturbation> parse_perturbation_spec(
    const std::string& spec, std::size_t object_length) {
  std::vector<Perturbation> taus;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = spec.find(';', start);
    const std::string item =
        spec.substr(start, end == std::string::npos ? end : end - start);
    start = end == std::string::npos ? spec.size() + 1 : end + 1;
    if (item.empty()) continue;
    try {
      if (item == "flip@all") {
        for (std::size_t i = 0; i < object_length; ++i)
          taus.push_back(Perturbation::flip(i));
      } else if (item.rfind("flip@", 0) == 0) {
        taus.push_back(Perturbation::flip(std::stoul(item.substr(5))));
      } else if (item.rfind("sub@", 0) == 0) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq + 2 != item.size())
          throw InvariantError("bad substitute item");
        taus.push_back(
            Perturbation::substitute(std::stoul(item.substr(4, eq - 4)),
                                     item[eq + 1]));
      } else if (item.rfind("del@", 0) == 0) {
        const std::size_t plus = item.find('+');
        if (plus == std::string::npos)
          throw InvariantError("bad delete item");
        taus.push_back(Perturbation::delete_block(
            std::stoul(item.substr(4, plus - 4)),
            std::stoul(item.substr(plus + 1))));
      } else {
        throw InvariantError("unknown item kind");
      }
    } catch (const std::exception&) {
      throw InvariantError("perturbation spec: cannot parse '" + item +
                           "' (expect flip@P, flip@all, sub@P=S, del@P+L)");
    }
  }
  if (taus.empty())
    throw InvariantError("perturbation spec: no perturbations given");
  return taus;
}

// Stable sort by |delta| descending; equal magnitudes keep input order.
inline std::vector<RankedPerturbation> rank_perturbations(
    const std::string& object, const std::vector<Perturbation>& taus,
    const BdmConfig& cfg, const OutputFrequencyTable& table) {
  std::vector<RankedPerturbation> ranked;
  ranked.reserve(taus.size());
  for (const Perturbation& tau : taus)
    ranked.push_back({tau, aid_delta(object, tau, cfg, table)});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPerturbation& a, const RankedPerturbation& b) {
                     return std::abs(a.delta_bits) > std::abs(b.delta_bits);
                   });
  return ranked;
}

}  // namespace collapselab
