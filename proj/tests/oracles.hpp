#pragma once

// Reference computations written directly from the definitions, sharing no
// code with the library beyond Rational and the spec loader.

#include "xferop/io.hpp"

#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using xferop::Rational;

// Inverse branches of an interval system read straight off the spec: each
// branch x -> s x + c on its domain gives the candidate (y - c) / s.
inline std::set<Rational> preimages1(const xferop::IntervalSystem& is, const Rational& y) {
    std::set<Rational> out;
    for (const auto& b : is.branches) {
        Rational x = (y - b.map.intercept) / b.map.slope;
        if (b.domain.contains(x)) out.insert(x);
    }
    return out;
}

inline std::set<Rational> preimages(const xferop::IntervalSystem& is, const Rational& y, int n) {
    std::set<Rational> cur{y};
    for (int k = 0; k < n; ++k) {
        std::set<Rational> next;
        for (const auto& z : cur)
            for (const auto& x : preimages1(is, z)) next.insert(x);
        cur = std::move(next);
    }
    return cur;
}

inline const xferop::Branch* branch_of(const xferop::IntervalSystem& is, const Rational& x) {
    for (const auto& b : is.branches)
        if (b.domain.contains(x)) return &b;
    return nullptr;
}

// rho from the spec pieces and overrides, without the library's lookup.
inline Rational rho(const xferop::IntervalPotential& p, const Rational& x) {
    for (const auto& [pt, v] : p.overrides)
        if (pt == x) return v;
    for (const auto& piece : p.pieces)
        if (piece.domain.contains(x)) return piece.f(x);
    return Rational(0);
}

// L^n(a)(y) by explicit fibre enumeration with the cocycle built step by step.
template <class F>
Rational transfer(const xferop::IntervalSystem& is, const xferop::IntervalPotential& p, F a, const Rational& y, int n) {
    std::vector<std::pair<Rational, Rational>> cur{{y, Rational(1)}};  // (point, rho product along the way back)
    for (int k = 0; k < n; ++k) {
        std::vector<std::pair<Rational, Rational>> next;
        for (const auto& [z, w] : cur)
            for (const auto& x : preimages1(is, z)) next.push_back({x, w * rho(p, x)});
        cur = std::move(next);
    }
    Rational s(0);
    for (const auto& [x, w] : cur) s += w * a(x);
    return s;
}

inline Rational dyadic(std::mt19937_64& rng, int bits) {
    std::uniform_int_distribution<long> d(0, 1L << bits);
    return Rational(d(rng), 1L << bits);
}

inline Rational random_rational(std::mt19937_64& rng, int maxden = 97) {
    std::uniform_int_distribution<long> den(1, maxden);
    long q = den(rng);
    std::uniform_int_distribution<long> num(0, q);
    return Rational(num(rng), q);
}

// Groupoid elements (i, n - m, j) of a set of infinite paths: the tails
// agree after dropping n edges from path i and m edges from path j.
inline std::set<std::tuple<std::size_t, int, std::size_t>> groupoid_elements(const std::vector<xferop::Point>& pts,
                                                                             int depth) {
    constexpr std::size_t L = 96;
    std::set<std::tuple<std::size_t, int, std::size_t>> out;
    std::vector<std::vector<int>> edges;
    for (const auto& p : pts) edges.push_back(std::get<xferop::Path>(p).first_edges(L + static_cast<std::size_t>(depth)));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            for (int n = 0; n <= depth; ++n)
                for (int m = 0; m <= depth; ++m) {
                    bool same = true;
                    for (std::size_t t = 0; t < L && same; ++t)
                        same = edges[i][static_cast<std::size_t>(n) + t] == edges[j][static_cast<std::size_t>(m) + t];
                    if (same) out.insert({i, n - m, j});
                }
    return out;
}

}  // namespace oracle
