#include "xferop/graph.hpp"

#include "xferop/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xferop {

void Graph::index() {
    by_range.assign(vertices.size(), {});
    by_source.assign(vertices.size(), {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        by_range[static_cast<std::size_t>(edges[e].r)].push_back(static_cast<int>(e));
        by_source[static_cast<std::size_t>(edges[e].s)].push_back(static_cast<int>(e));
    }
}

int Graph::vertex_index(const std::string& name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == name) return static_cast<int>(i);
    return -1;
}

int Graph::edge_index(const std::string& name) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].name == name) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------- Word

bool Word::is_prefix_of(const Word& o) const {
    if (vertex != o.vertex || edges.size() > o.edges.size()) return false;
    return std::equal(edges.begin(), edges.end(), o.edges.begin());
}

std::string Word::str(const Graph& g) const {
    if (edges.empty()) return "Z(" + g.vertices[static_cast<std::size_t>(vertex)] + ")";
    std::string s = "Z(";
    for (std::size_t i = 0; i < edges.size(); ++i) s += (i ? " " : "") + g.edge_name(edges[i]);
    return s + ")";
}

std::vector<Word> children(const Graph& g, const Word& w) {
    int v = w.edges.empty() ? w.vertex : g.s(w.edges.back());
    std::vector<Word> out;
    for (int e : g.by_range[static_cast<std::size_t>(v)]) {
        Word c = w;
        c.edges.push_back(e);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Word> atoms(const Graph& g, std::size_t level) {
    std::vector<Word> frontier, out;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) frontier.push_back({static_cast<int>(v), {}});
    for (std::size_t l = 0; l < level; ++l) {
        std::vector<Word> next;
        for (const auto& w : frontier) {
            auto ch = children(g, w);
            if (ch.empty()) out.push_back(w);
            next.insert(next.end(), ch.begin(), ch.end());
        }
        frontier = std::move(next);
    }
    out.insert(out.end(), frontier.begin(), frontier.end());
    std::sort(out.begin(), out.end());
    return out;
}

Path sample_path(const Graph& g, const Word& w) {
    std::vector<int> edges = w.edges;
    int v = edges.empty() ? w.vertex : g.s(edges.back());
    std::map<int, std::size_t> seen;
    while (true) {
        if (g.is_source(v)) {
            if (edges.empty()) return Path::vertex_point(v);
            return Path::finite(g, edges);
        }
        auto it = seen.find(v);
        if (it != seen.end()) {
            std::vector<int> prefix(edges.begin(), edges.begin() + static_cast<long>(it->second));
            std::vector<int> cycle(edges.begin() + static_cast<long>(it->second), edges.end());
            return Path::periodic(g, prefix, cycle);
        }
        seen[v] = edges.size();
        int e = g.by_range[static_cast<std::size_t>(v)].front();
        edges.push_back(e);
        v = g.s(e);
    }
}

// ---------------------------------------------------------------- Path

Path Path::finite(const Graph& g, std::vector<int> edges) {
    Path p{edges.empty() ? 0 : g.r(edges.front()), std::move(edges), {}};
    return p;
}

Path Path::periodic(const Graph& g, std::vector<int> prefix, std::vector<int> cycle) {
    Path p{0, std::move(prefix), std::move(cycle)};
    p.canonicalize(g);
    return p;
}

void Path::canonicalize(const Graph& g) {
    if (!cycle.empty()) {
        const std::size_t n = cycle.size();
        for (std::size_t per = 1; per < n; ++per) {
            if (n % per) continue;
            bool ok = true;
            for (std::size_t i = per; i < n && ok; ++i) ok = cycle[i] == cycle[i - per];
            if (ok) {
                cycle.resize(per);
                break;
            }
        }
        while (!prefix.empty() && prefix.back() == cycle.back()) {
            prefix.pop_back();
            std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
        }
    }
    if (!prefix.empty()) vertex = g.r(prefix.front());
    else if (!cycle.empty()) vertex = g.r(cycle.front());
}

int Path::edge_at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (cycle.empty()) return -1;
    return cycle[(i - prefix.size()) % cycle.size()];
}

std::vector<int> Path::first_edges(std::size_t k) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < k; ++i) {
        int e = edge_at(i);
        if (e < 0) break;
        out.push_back(e);
    }
    return out;
}

Path Path::shift(const Graph& g) const {
    if (is_vertex()) throw out_of_domain("shift of a vertex point");
    Path p = *this;
    if (!p.prefix.empty()) {
        if (p.cycle.empty() && p.prefix.size() == 1) return vertex_point(g.s(p.prefix.front()));
        p.prefix.erase(p.prefix.begin());
    } else {
        std::rotate(p.cycle.begin(), p.cycle.begin() + 1, p.cycle.end());
    }
    p.canonicalize(g);
    return p;
}

Path Path::prepend(const Graph& g, int e) const {
    if (g.s(e) != vertex) throw out_of_domain("edge " + g.edge_name(e) + " does not connect to the path");
    Path p = *this;
    p.prefix.insert(p.prefix.begin(), e);
    p.canonicalize(g);
    return p;
}

bool Path::valid(const Graph& g) const {
    std::vector<int> all = prefix;
    all.insert(all.end(), cycle.begin(), cycle.end());
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        if (g.s(all[i]) != g.r(all[i + 1])) return false;
    if (!cycle.empty()) return g.s(cycle.back()) == g.r(cycle.front());
    if (prefix.empty()) return g.is_source(vertex);
    return g.is_source(g.s(prefix.back()));
}

bool Path::in_cylinder(const Word& w) const {
    if (vertex != w.vertex) return false;
    if (w.edges.empty()) return true;
    return first_edges(w.edges.size()) == w.edges;
}

std::string Path::str(const Graph& g) const {
    if (is_vertex()) return "<" + g.vertices[static_cast<std::size_t>(vertex)] + ">";
    std::string s;
    for (int e : prefix) s += (s.empty() ? "" : " ") + g.edge_name(e);
    if (!cycle.empty()) {
        s += (s.empty() ? "(" : " (");
        for (std::size_t i = 0; i < cycle.size(); ++i) s += (i ? " " : "") + g.edge_name(cycle[i]);
        s += ")^";
    }
    return s;
}

// --------------------------------------------------------- CylinderSet

CylinderSet::CylinderSet(GraphPtr g, std::vector<Word> words) : g_(std::move(g)), words_(std::move(words)) {
    normalize();
}

CylinderSet CylinderSet::full(GraphPtr g) {
    std::vector<Word> w;
    for (std::size_t v = 0; v < g->vertices.size(); ++v) w.push_back({static_cast<int>(v), {}});
    return CylinderSet(std::move(g), std::move(w));
}

CylinderSet CylinderSet::delta(GraphPtr g) {
    std::vector<Word> w;
    for (std::size_t v = 0; v < g->vertices.size(); ++v)
        if (!g->is_source(static_cast<int>(v))) w.push_back({static_cast<int>(v), {}});
    return CylinderSet(std::move(g), std::move(w));
}

CylinderSet CylinderSet::cylinder(GraphPtr g, Word w) { return CylinderSet(std::move(g), {std::move(w)}); }

void CylinderSet::normalize() {
    std::sort(words_.begin(), words_.end(), [](const Word& a, const Word& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a < b;
    });
    std::vector<Word> kept;
    for (const auto& w : words_) {
        bool covered = std::any_of(kept.begin(), kept.end(), [&](const Word& k) { return k.is_prefix_of(w); });
        if (!covered) kept.push_back(w);
    }
    std::set<Word> s(kept.begin(), kept.end());
    std::size_t maxlen = 0;
    for (const auto& w : s) maxlen = std::max(maxlen, w.length());
    for (std::size_t len = maxlen; len >= 1; --len) {
        std::map<Word, std::size_t> parents;
        for (const auto& w : s)
            if (w.length() == len) {
                Word p = w;
                p.edges.pop_back();
                ++parents[p];
            }
        for (const auto& [p, count] : parents) {
            auto ch = children(*g_, p);
            if (count == ch.size()) {
                for (const auto& c : ch) s.erase(c);
                s.insert(p);
            }
        }
    }
    words_.assign(s.begin(), s.end());
}

bool CylinderSet::contains(const Path& p) const {
    return std::any_of(words_.begin(), words_.end(), [&](const Word& w) { return p.in_cylinder(w); });
}

bool CylinderSet::covers(const Word& w) const {
    return std::any_of(words_.begin(), words_.end(), [&](const Word& u) { return u.is_prefix_of(w); });
}

CylinderSet CylinderSet::unite(const CylinderSet& o) const {
    std::vector<Word> w = words_;
    w.insert(w.end(), o.words_.begin(), o.words_.end());
    return CylinderSet(g_ ? g_ : o.g_, std::move(w));
}

CylinderSet CylinderSet::intersect(const CylinderSet& o) const {
    std::vector<Word> w;
    for (const auto& a : words_)
        for (const auto& b : o.words_) {
            if (a.is_prefix_of(b)) w.push_back(b);
            else if (b.is_prefix_of(a)) w.push_back(a);
        }
    return CylinderSet(g_ ? g_ : o.g_, std::move(w));
}

namespace {

void subtract(const Graph& g, const Word& a, const std::vector<Word>& B, std::vector<Word>& out) {
    std::vector<Word> inside;
    for (const auto& b : B) {
        if (b.is_prefix_of(a)) return;
        if (a.is_prefix_of(b)) inside.push_back(b);
    }
    if (inside.empty()) {
        out.push_back(a);
        return;
    }
    for (const auto& c : children(g, a)) subtract(g, c, inside, out);
}

}  // namespace

CylinderSet CylinderSet::minus(const CylinderSet& o) const {
    if (!g_) return *this;
    std::vector<Word> out;
    for (const auto& a : words_) subtract(*g_, a, o.words_, out);
    return CylinderSet(g_, std::move(out));
}

namespace {

void image_word(const Graph& g, const Word& w, std::vector<Word>& out) {
    if (w.edges.size() >= 2) {
        Word im{g.r(w.edges[1]), std::vector<int>(w.edges.begin() + 1, w.edges.end())};
        out.push_back(std::move(im));
    } else if (w.edges.size() == 1) {
        out.push_back({g.s(w.edges[0]), {}});
    } else {
        for (const auto& c : children(g, w)) image_word(g, c, out);
    }
}

}  // namespace

CylinderSet CylinderSet::image() const {
    if (!g_) return *this;
    std::vector<Word> out;
    for (const auto& w : words_) image_word(*g_, w, out);
    return CylinderSet(g_, std::move(out));
}

CylinderSet CylinderSet::preimage() const {
    if (!g_) return *this;
    std::vector<Word> out;
    for (const auto& w : words_) {
        int v = w.vertex;
        for (int e : g_->by_source[static_cast<std::size_t>(v)]) {
            Word p{g_->r(e), {e}};
            p.edges.insert(p.edges.end(), w.edges.begin(), w.edges.end());
            out.push_back(std::move(p));
        }
    }
    return CylinderSet(g_, std::move(out));
}

std::string CylinderSet::str() const {
    if (words_.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < words_.size(); ++i) s += (i ? " U " : "") + words_[i].str(*g_);
    return s;
}

}  // namespace xferop
