#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topomin/chain_core.hpp"

namespace topomin {

/// H_k(K; Z) = Z^rank + sum Z/t_i.
struct HomologyGroup {
  int k = 0;
  std::size_t rank = 0;
  std::vector<Integer> torsion;  // each > 1, divisibility chain

  bool trivial() const { return rank == 0 && torsion.empty(); }

  std::string to_string() const {
    if (trivial()) return "0";
    std::string s;
    if (rank > 0) s = rank == 1 ? "Z" : "Z^" + std::to_string(rank);
    for (const auto& t : torsion) s += (s.empty() ? "" : " + ") + std::string("Z/") + t.str();
    return s;
  }

  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

inline HomologyGroup homology_group(const Complex& K, int k) {
  if (k < 0 || k > K.dimension()) throw InvalidInput("homology degree out of range");
  HomologyData h = K.reduction().homology(static_cast<std::size_t>(k));
  return HomologyGroup{k, h.rank, std::move(h.torsion)};
}

inline bool is_cycle(const Chain& z) { return boundary(z).is_zero(); }

struct NullHomology {
  bool null_homologous = false;
  std::optional<Chain> witness;  // d(witness) == z whenever null_homologous
};

/// Decides [z] = 0 in H_k(K; Z). Throws PreconditionError for non-cycles.
inline NullHomology is_null_homologous(const Chain& z) {
  if (!is_cycle(z)) throw PreconditionError("is_null_homologous: input is not a cycle");
  const ComplexPtr& K = z.complex();
  const int k = z.dimension();
  if (z.is_zero()) return {true, Chain(K, k + 1)};
  auto solution = K->reduction().solve_boundary(static_cast<std::size_t>(k), z.to_sparse());
  if (!solution) return {false, std::nullopt};
  Chain x(K, k + 1);
  for (const auto& [i, c] : *solution) x.add(i, c);
  if (!(boundary(x) == z)) throw Error("internal: lifted witness does not bound the cycle");
  return {true, std::move(x)};
}

inline NullHomology is_null_homologous(const Chain& z, const ComplexPtr& K) {
  if (z.complex() != K) throw InvalidInput("chain does not live on the given complex");
  return is_null_homologous(z);
}

}  // namespace topomin
