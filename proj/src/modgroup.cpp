#include "whmap/modgroup.hpp"

#include <json.hpp>

#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace whmap {

namespace {

const MoebiusMap kS = MoebiusMap::S();
const MoebiusMap kT = MoebiusMap::T();
const MoebiusMap kTinv = kT.inverse();

MoebiusMap letter_matrix(Letter l) {
    switch (l) {
        case Letter::S: return kS;
        case Letter::T: return kT;
        default: return kTinv;
    }
}

void push_reduced(std::vector<Letter>& w, Letter l) {
    if (!w.empty()) {
        Letter last = w.back();
        bool cancels = (last == Letter::S && l == Letter::S) ||
                       (last == Letter::T && l == Letter::Tinv) ||
                       (last == Letter::Tinv && l == Letter::T);
        if (cancels) {
            w.pop_back();
            return;
        }
    }
    w.push_back(l);
}

void push_t_power(std::vector<Letter>& w, const Int& q) {
    if (abs(q) > 10000000)
        throw std::domain_error("word_decompose: translation power too large");
    long n = static_cast<long>(q);
    Letter l = n > 0 ? Letter::T : Letter::Tinv;
    for (long i = 0; i < std::abs(n); ++i) push_reduced(w, l);
}

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

MoebiusMap Word::evaluate() const {
    MoebiusMap m;
    for (Letter l : letters) m = m * letter_matrix(l);
    return m;
}

std::string Word::str() const {
    std::string s;
    for (Letter l : letters)
        s += (l == Letter::S) ? "S" : (l == Letter::T ? "T" : "t");
    return s;
}

Word word_decompose(const MoebiusMap& m) {
    if (m.det() != 1)
        throw std::invalid_argument("word_decompose: input not in PSL2(Z)");
    Int a = m.a, b = m.b, c = m.c, d = m.d;
    Word w;
    while (c != 0) {
        Int q = floor_div(a, c);
        // m = T^q S m' with m' = S T^{-q} m.
        push_t_power(w.letters, q);
        push_reduced(w.letters, Letter::S);
        Int a1 = -c, b1 = -d;
        Int c1 = a - q * c, d1 = b - q * d;
        a = a1; b = b1; c = c1; d = d1;
    }
    // Upper triangular, det 1: +-T^k.
    if (a < 0) { a = -a; b = -b; d = -d; }
    push_t_power(w.letters, b);
    return w;
}

int abelianization(const MoebiusMap& m) {
    Word w = word_decompose(m);
    long v = 0;
    for (Letter l : w.letters)
        v += (l == Letter::S) ? 3 : (l == Letter::T ? 1 : -1);
    return static_cast<int>(((v % 6) + 6) % 6);
}

bool g0_contains(const MoebiusMap& m) { return abelianization(m) == 0; }

Subgroup Subgroup::full() {
    Subgroup g;
    g.index = 1;
    g.actS = {0};
    g.actT = {0};
    g.actTinv = {0};
    return g;
}

int Subgroup::act_letter(Letter l, int coset) const {
    switch (l) {
        case Letter::S: return actS[coset];
        case Letter::T: return actT[coset];
        default: return actTinv[coset];
    }
}

int Subgroup::act_word(const Word& w, int coset) const {
    // m = x1...xk acts on the left; apply the last letter first.
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        coset = act_letter(*it, coset);
    return coset;
}

const Subgroup::TCycles& Subgroup::t_cycle_data() const {
    if (!t_cycles_) {
        auto data = std::make_shared<TCycles>();
        data->id.assign(index, -1);
        data->pos.assign(index, 0);
        for (int i = 0; i < index; ++i) {
            if (data->id[i] >= 0) continue;
            int cid = static_cast<int>(data->cycles.size());
            std::vector<int> cyc;
            int j = i;
            do {
                data->id[j] = cid;
                data->pos[j] = static_cast<int>(cyc.size());
                cyc.push_back(j);
                j = actT[j];
            } while (j != i);
            data->cycles.push_back(std::move(cyc));
        }
        t_cycles_ = std::move(data);
    }
    return *t_cycles_;
}

int Subgroup::act_t_power(const Int& q, int coset) const {
    if (q == 0) return coset;
    const TCycles& tc = t_cycle_data();
    const std::vector<int>& cyc = tc.cycles[tc.id[coset]];
    const int len = static_cast<int>(cyc.size());
    int r = static_cast<int>(((q % len) + len) % len);
    return cyc[(tc.pos[coset] + r) % len];
}

int Subgroup::act(const MoebiusMap& m, int coset) const {
    // Same Euclidean peeling as word_decompose, but applied directly to the
    // coset right-to-left so translation powers jump along T-cycles instead
    // of being expanded letter by letter.
    if (m.det() != 1)
        throw std::invalid_argument("Subgroup::act: input not in PSL2(Z)");
    Int a = m.a, b = m.b, cc = m.c, d = m.d;
    std::vector<Int> quotients;
    while (cc != 0) {
        // Nearest-integer quotient: |a - q*cc| <= |cc|/2, so the loop length
        // is logarithmic. Floor quotients give the "minus" continued
        // fraction, whose length can be linear in the entries.
        Int q = floor_div(2 * a + cc, 2 * cc);
        quotients.push_back(q);
        Int a1 = -cc, b1 = -d;
        Int c1 = a - q * cc, d1 = b - q * d;
        a = a1;
        b = b1;
        cc = c1;
        d = d1;
    }
    if (a < 0) b = -b;
    // The word reads T^{q1} S T^{q2} S ... T^{qk} S T^{b}; act last letter
    // first.
    coset = act_t_power(b, coset);
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
        coset = actS[coset];
        coset = act_t_power(*it, coset);
    }
    return coset;
}

std::vector<MoebiusMap> Subgroup::coset_reps() const {
    std::vector<MoebiusMap> reps(index);
    std::vector<bool> seen(index, false);
    reps[0] = MoebiusMap::identity();
    seen[0] = true;
    std::deque<int> queue{0};
    const Letter order[3] = {Letter::S, Letter::T, Letter::Tinv};
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        for (Letter l : order) {
            int j = act_letter(l, i);
            if (!seen[j]) {
                seen[j] = true;
                reps[j] = letter_matrix(l) * reps[i];
                queue.push_back(j);
            }
        }
    }
    return reps;
}

Subgroup Subgroup::canonicalized() const {
    std::vector<int> relabel(index, -1);
    relabel[0] = 0;
    int next = 1;
    std::deque<int> queue{0};
    const Letter order[3] = {Letter::S, Letter::T, Letter::Tinv};
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        for (Letter l : order) {
            int j = act_letter(l, i);
            if (relabel[j] < 0) {
                relabel[j] = next++;
                queue.push_back(j);
            }
        }
    }
    if (next != index)
        throw std::logic_error("Subgroup: permutation action not transitive");
    Subgroup out;
    out.index = index;
    out.actS.assign(index, 0);
    out.actT.assign(index, 0);
    out.actTinv.assign(index, 0);
    for (int i = 0; i < index; ++i) {
        out.actS[relabel[i]] = relabel[actS[i]];
        out.actT[relabel[i]] = relabel[actT[i]];
        out.actTinv[relabel[i]] = relabel[actTinv[i]];
    }
    return out;
}

std::string Subgroup::to_json() const {
    nlohmann::json j;
    j["index"] = index;
    j["actS"] = actS;
    j["actT"] = actT;
    return j.dump();
}

Subgroup Subgroup::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Subgroup g;
    g.index = j.at("index").get<int>();
    g.actS = j.at("actS").get<std::vector<int>>();
    g.actT = j.at("actT").get<std::vector<int>>();
    if (static_cast<int>(g.actS.size()) != g.index ||
        static_cast<int>(g.actT.size()) != g.index)
        throw std::invalid_argument("Subgroup::from_json: inconsistent table");
    g.actTinv.assign(g.index, 0);
    for (int i = 0; i < g.index; ++i) g.actTinv[g.actT[i]] = i;
    return g;
}

namespace {

struct MatModN {
    int a, b, c, d;
};

std::string canonical_modn(const MoebiusMap& m, int n) {
    auto red = [&](const Int& x) {
        return static_cast<int>(((x % n) + n) % n);
    };
    int a = red(m.a), b = red(m.b), c = red(m.c), d = red(m.d);
    int na = (n - a) % n, nb = (n - b) % n, nc = (n - c) % n, nd = (n - d) % n;
    std::array<int, 4> v1{a, b, c, d}, v2{na, nb, nc, nd};
    const auto& v = (v2 < v1) ? v2 : v1;
    std::ostringstream os;
    os << v[0] << "," << v[1] << "," << v[2] << "," << v[3];
    return os.str();
}

}  // namespace

Subgroup congruence_subgroup(int N) {
    if (N < 1) throw std::invalid_argument("congruence_subgroup: N must be >= 1");
    if (N == 1) return Subgroup::full();
    auto oracle = [N](const MoebiusMap& m) {
        return canonical_modn(m, N) == canonical_modn(MoebiusMap::identity(), N);
    };
    auto label = [N](const MoebiusMap& m) { return canonical_modn(m, N); };
    return subgroup_from_oracle(oracle, 20000000, label);
}

Subgroup g0_subgroup() {
    auto label = [](const MoebiusMap& m) { return std::to_string(abelianization(m)); };
    return subgroup_from_oracle([](const MoebiusMap& m) { return g0_contains(m); }, 100,
                                label);
}

Subgroup subgroup_from_oracle(const std::function<bool(const MoebiusMap&)>& oracle,
                              int bound,
                              const std::function<std::string(const MoebiusMap&)>& prelabel) {
    if (!oracle(MoebiusMap::identity()))
        throw std::invalid_argument("subgroup_from_oracle: oracle rejects the identity");
    std::vector<MoebiusMap> reps{MoebiusMap::identity()};
    std::unordered_map<std::string, std::vector<int>> buckets;
    auto label_of = [&](const MoebiusMap& m) {
        return prelabel ? prelabel(m) : std::string();
    };
    buckets[label_of(reps[0])].push_back(0);

    Subgroup g;
    g.actS.push_back(-1);
    g.actT.push_back(-1);
    g.actTinv.push_back(-1);

    auto locate = [&](const MoebiusMap& cand) -> int {
        auto it = buckets.find(label_of(cand));
        if (it != buckets.end()) {
            for (int j : it->second) {
                if (oracle(reps[j].inverse() * cand)) return j;
            }
        }
        return -1;
    };

    std::deque<int> queue{0};
    const Letter order[3] = {Letter::S, Letter::T, Letter::Tinv};
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        for (Letter l : order) {
            std::vector<int>& row = (l == Letter::S)   ? g.actS
                                    : (l == Letter::T) ? g.actT
                                                       : g.actTinv;
            if (row[i] >= 0) continue;
            MoebiusMap cand = letter_matrix(l) * reps[i];
            int j = locate(cand);
            if (j < 0) {
                j = static_cast<int>(reps.size());
                if (j >= bound)
                    throw std::runtime_error("subgroup_from_oracle: index exceeds bound");
                reps.push_back(cand);
                buckets[label_of(cand)].push_back(j);
                g.actS.push_back(-1);
                g.actT.push_back(-1);
                g.actTinv.push_back(-1);
                queue.push_back(j);
            }
            row[i] = j;
            // Record the inverse direction as well.
            std::vector<int>& inv = (l == Letter::S)   ? g.actS
                                    : (l == Letter::T) ? g.actTinv
                                                       : g.actT;
            inv[j] = i;
        }
    }
    g.index = static_cast<int>(reps.size());
    return g;
}

Subgroup intersect(const Subgroup& h, const Subgroup& k) {
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> states{{0, 0}};
    id[{0, 0}] = 0;
    Subgroup g;
    g.actS.push_back(-1);
    g.actT.push_back(-1);
    g.actTinv.push_back(-1);
    std::deque<int> queue{0};
    const Letter order[3] = {Letter::S, Letter::T, Letter::Tinv};
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        auto [hi, ki] = states[i];
        for (Letter l : order) {
            std::pair<int, int> next{h.act_letter(l, hi), k.act_letter(l, ki)};
            auto it = id.find(next);
            int j;
            if (it == id.end()) {
                j = static_cast<int>(states.size());
                id[next] = j;
                states.push_back(next);
                g.actS.push_back(-1);
                g.actT.push_back(-1);
                g.actTinv.push_back(-1);
                queue.push_back(j);
            } else {
                j = it->second;
            }
            (l == Letter::S ? g.actS : l == Letter::T ? g.actT : g.actTinv)[i] = j;
        }
    }
    g.index = static_cast<int>(states.size());
    return g.canonicalized();
}

std::vector<MoebiusMap> schreier_generators(const Subgroup& g) {
    std::vector<MoebiusMap> reps = g.coset_reps();
    std::vector<MoebiusMap> gens;
    std::set<std::string> seen;
    for (int i = 0; i < g.index; ++i) {
        for (Letter l : {Letter::S, Letter::T}) {
            int j = g.act_letter(l, i);
            MoebiusMap gen = reps[j].inverse() * letter_matrix(l) * reps[i];
            if (gen.is_identity()) continue;
            if (seen.insert(gen.str()).second) gens.push_back(gen);
        }
    }
    return gens;
}

Subgroup conjugate_subgroup(const Subgroup& g, const MoebiusMap& m) {
    if (!in_psl2z(m))
        throw std::invalid_argument("conjugate_subgroup: conjugator not in PSL2(Z)");
    // Cosets of m G m^-1 correspond to cosets of G via y -> m^-1 y m; the
    // letter x then acts as m^-1 x m does on G's cosets.
    MoebiusMap mi = m.inverse();
    Subgroup out;
    out.index = g.index;
    out.actS.resize(g.index);
    out.actT.resize(g.index);
    out.actTinv.resize(g.index);
    Word wS = word_decompose(mi * kS * m);
    Word wT = word_decompose(mi * kT * m);
    for (int i = 0; i < g.index; ++i) {
        out.actS[i] = g.act_word(wS, i);
        out.actT[i] = g.act_word(wT, i);
    }
    for (int i = 0; i < g.index; ++i) out.actTinv[out.actT[i]] = i;
    return out.canonicalized();
}

namespace {

bool is_farey_pair(const BoundaryPoint& x, const BoundaryPoint& y) {
    Int d = x.num * y.den - x.den * y.num;
    return d == 1 || d == -1;
}

// Canonical determinant-1 matrix sending the oriented edge (0 -> inf) to e.
MoebiusMap edge_frame(const OrientedEdge& e) {
    Int a = e.to.num, b = e.from.num, c = e.to.den, d = e.from.den;
    Int det = a * d - b * c;
    if (det == -1) { a = -a; c = -c; }
    return MoebiusMap(a, b, c, d);
}

}  // namespace

MoebiusMap map_oriented_edge(const OrientedEdge& e1, const OrientedEdge& e2) {
    if (!is_farey_pair(e1.from, e1.to) || !is_farey_pair(e2.from, e2.to))
        throw std::invalid_argument("map_oriented_edge: not a Farey edge");
    return edge_frame(e2) * edge_frame(e1).inverse();
}

std::optional<MoebiusMap> edge_in_orbit(const Subgroup& g, const OrientedEdge& e0,
                                        const OrientedEdge& e) {
    MoebiusMap m1 = map_oriented_edge(e0, e);
    if (g.contains(m1)) return m1;
    MoebiusMap m2 = map_oriented_edge(e0, e.reversed());
    if (g.contains(m2)) return m2;
    return std::nullopt;
}

namespace {

std::string projective_label(const Int& u, const Int& v, int n) {
    if (n == 1) return "";
    auto red = [&](const Int& x) {
        return static_cast<int>(((x % n) + n) % n);
    };
    int bu = red(u), bv = red(v);
    std::array<int, 2> best{n, n};
    for (int lam = 1; lam < n; ++lam) {
        if (std::gcd(lam, n) != 1) continue;
        std::array<int, 2> cand{(bu * lam) % n, (bv * lam) % n};
        if (cand < best) best = cand;
    }
    std::ostringstream os;
    os << best[0] << ":" << best[1];
    return os.str();
}

}  // namespace

std::string divisor_coset_label(const MoebiusMap& m, int p, int q) {
    return projective_label(m.b, m.d, p) + "|" + projective_label(m.a, m.c, q);
}

Subgroup ga_subgroup(const MoebiusMap& A, int bound) {
    if (A.b != 0 || A.c != 0 || A.a <= A.d || A.d < 1)
        throw std::invalid_argument("ga_subgroup: A must be diag(p,q) with p > q >= 1");
    Int p = A.a, q = A.d;
    int pi = static_cast<int>(p), qi = static_cast<int>(q);
    auto conj_ok = [p, q](const MoebiusMap& m) {
        return m.b % p == 0 && m.c % q == 0;
    };
    auto conj = [p, q](const MoebiusMap& m) {
        return MoebiusMap(m.a, m.b / p * q, m.c / q * p, m.d);
    };
    auto oracle = [&, conj_ok, conj](const MoebiusMap& m) {
        return conj_ok(m) && g0_contains(conj(m));
    };
    // gK = g'K implies gD = g'D for D = {b = 0 mod p, c = 0 mod q}, and that
    // coset is pinned by where g sends [0:1] mod p and [1:0] mod q.
    auto label = [pi, qi](const MoebiusMap& m) {
        return divisor_coset_label(m, pi, qi);
    };
    Subgroup k = subgroup_from_oracle(oracle, bound, label);
    return intersect(g0_subgroup(), k);
}

}  // namespace whmap
