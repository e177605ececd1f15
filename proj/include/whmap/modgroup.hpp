#pragma once

#include "whmap/moebius.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace whmap {

enum class Letter { S, T, Tinv };

/// Word over {S, T, T^-1}, freely reduced (no SS, no T T^-1 pairs).
struct Word {
    std::vector<Letter> letters;

    MoebiusMap evaluate() const;
    std::string str() const;
};

/// Euclidean rewriting of an integral determinant-1 matrix into S,T letters.
/// The evaluated word equals the input projectively.
Word word_decompose(const MoebiusMap& m);

/// Abelianization PSL2(Z) -> Z/6 (S -> 3, T -> 1).
int abelianization(const MoebiusMap& m);

/// Membership in G0, the commutator subgroup of PSL2(Z) (index 6, the
/// uniformizing group of the modular torus).
bool g0_contains(const MoebiusMap& m);

/// Finite-index subgroup of PSL2(Z) as a coset table: permutation action of
/// S and T on left cosets {0..index-1}, coset 0 the subgroup itself.
/// Tables are produced in BFS discovery order with the fixed generator order
/// S, T, T^-1, so identical subgroups yield identical tables.
struct Subgroup {
    int index = 1;
    std::vector<int> actS;   // i -> coset of S * rep(i)
    std::vector<int> actT;
    std::vector<int> actTinv;

    static Subgroup full();

    int act_letter(Letter l, int coset) const;
    int act_word(const Word& w, int coset) const;
    /// Coset motion under a translation power, jumping along the T-cycle of
    /// the coset so arbitrarily large exponents stay cheap.
    int act_t_power(const Int& q, int coset) const;
    int act(const MoebiusMap& m, int coset) const;

    bool contains(const MoebiusMap& m) const { return act(m, 0) == 0; }

    /// Left-coset representatives in BFS order; reps[0] is the identity.
    std::vector<MoebiusMap> coset_reps() const;

    /// Relabel cosets by a fresh BFS from coset 0 (canonical form).
    Subgroup canonicalized() const;

    bool operator==(const Subgroup& o) const {
        return index == o.index && actS == o.actS && actT == o.actT && actTinv == o.actTinv;
    }

    std::string to_json() const;
    static Subgroup from_json(const std::string& text);

  private:
    /// Cycle decomposition of actT, built lazily: for each coset its cycle id
    /// and position, plus the cycles themselves in traversal order. Derived
    /// data only, so it is excluded from equality and serialization.
    struct TCycles {
        std::vector<int> id;
        std::vector<int> pos;
        std::vector<std::vector<int>> cycles;
    };
    mutable std::shared_ptr<const TCycles> t_cycles_;
    const TCycles& t_cycle_data() const;
};

/// Principal congruence subgroup Gamma(N) (kernel of reduction mod N,
/// projectivized).
Subgroup congruence_subgroup(int N);

/// Coset table for G0 via the Z/6 abelianization labels.
Subgroup g0_subgroup();

/// Breadth-first Schreier-graph enumeration for an arbitrary membership
/// oracle. `prelabel`, when provided, must be constant on left cosets; it is
/// used to bucket candidates so identification stays near-linear. Throws if
/// more than `bound` cosets are discovered.
Subgroup subgroup_from_oracle(const std::function<bool(const MoebiusMap&)>& oracle,
                              int bound,
                              const std::function<std::string(const MoebiusMap&)>& prelabel = {});

/// H ∩ K via the orbit of (0,0) in the product action.
Subgroup intersect(const Subgroup& h, const Subgroup& k);

/// Schreier generators over the coset representatives, identities filtered.
std::vector<MoebiusMap> schreier_generators(const Subgroup& g);

/// Conjugated subgroup m G m^-1 for m in PSL2(Z) (table-level relabeling).
Subgroup conjugate_subgroup(const Subgroup& g, const MoebiusMap& m);

/// The unique element of PSL2(Z) taking the oriented Farey edge e1 to e2.
MoebiusMap map_oriented_edge(const OrientedEdge& e1, const OrientedEdge& e2);

/// A witness gamma in G with gamma(e0) = e (either orientation), if any.
std::optional<MoebiusMap> edge_in_orbit(const Subgroup& g, const OrientedEdge& e0,
                                        const OrientedEdge& e);

/// G_A = G0 ∩ A G0 A^-1 for A = diag(p,q), p > q >= 1 coprime.
Subgroup ga_subgroup(const MoebiusMap& A, int bound = 100000);

/// Label constant on left cosets of D = {m : p | b, q | c}: the pair of
/// projective points (m.[0:1] mod p, m.[1:0] mod q). Used to bucket BFS coset
/// candidates for any subgroup contained in D.
std::string divisor_coset_label(const MoebiusMap& m, int p, int q);

}  // namespace whmap
