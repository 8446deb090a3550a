#pragma once

#include <compare>
#include <memory>
#include <string>
#include <vector>

namespace xferop {

// Edge e with range r(e) and source s(e). A path mu_1 mu_2 ... satisfies
// s(mu_i) = r(mu_{i+1}); the shift drops the first edge.
struct Edge {
    std::string name;
    int r = 0;
    int s = 0;
};

struct Graph {
    std::vector<std::string> vertices;
    std::vector<Edge> edges;
    int truncation_depth = 8;

    std::vector<std::vector<int>> by_range;   // r^{-1}(v)
    std::vector<std::vector<int>> by_source;  // s^{-1}(v)

    void index();
    bool is_source(int v) const { return by_range[static_cast<std::size_t>(v)].empty(); }
    int vertex_index(const std::string& name) const;
    int edge_index(const std::string& name) const;
    const std::string& edge_name(int e) const { return edges[static_cast<std::size_t>(e)].name; }
    int r(int e) const { return edges[static_cast<std::size_t>(e)].r; }
    int s(int e) const { return edges[static_cast<std::size_t>(e)].s; }
};

using GraphPtr = std::shared_ptr<const Graph>;

// Cylinder word. edges empty means the vertex cylinder Z(vertex).
struct Word {
    int vertex = 0;
    std::vector<int> edges;

    std::size_t length() const { return edges.size(); }
    bool is_prefix_of(const Word& o) const;
    std::string str(const Graph& g) const;
    friend auto operator<=>(const Word&, const Word&) = default;
    friend bool operator==(const Word&, const Word&) = default;
};

// Boundary path: a vertex point (no edges), a finite path ending at a source,
// or an eventually periodic infinite path prefix.cycle^infinity. Kept in a
// canonical form (primitive cycle, shortest prefix) so equality is structural.
struct Path {
    int vertex = 0;  // r(path)
    std::vector<int> prefix;
    std::vector<int> cycle;

    static Path vertex_point(int v) { return {v, {}, {}}; }
    static Path finite(const Graph& g, std::vector<int> edges);
    static Path periodic(const Graph& g, std::vector<int> prefix, std::vector<int> cycle);

    bool is_vertex() const { return prefix.empty() && cycle.empty(); }
    bool is_infinite() const { return !cycle.empty(); }
    int edge_at(std::size_t i) const;
    // First k edges (fewer if the path is finite and shorter).
    std::vector<int> first_edges(std::size_t k) const;
    Path shift(const Graph& g) const;
    Path prepend(const Graph& g, int e) const;
    bool valid(const Graph& g) const;
    bool in_cylinder(const Word& w) const;
    std::string str(const Graph& g) const;

    void canonicalize(const Graph& g);
    friend auto operator<=>(const Path&, const Path&) = default;
    friend bool operator==(const Path&, const Path&) = default;
};

// Finite union of cylinders in normal form: prefix-free, and no complete
// family of children is present without being merged into its parent.
class CylinderSet {
public:
    CylinderSet() = default;
    CylinderSet(GraphPtr g, std::vector<Word> words);

    static CylinderSet full(GraphPtr g);
    // All paths of positive length.
    static CylinderSet delta(GraphPtr g);
    static CylinderSet cylinder(GraphPtr g, Word w);

    const std::vector<Word>& words() const { return words_; }
    const GraphPtr& graph() const { return g_; }
    bool empty() const { return words_.empty(); }
    bool contains(const Path& p) const;
    bool covers(const Word& w) const;
    bool contains(const CylinderSet& o) const { return o.minus(*this).empty(); }

    CylinderSet unite(const CylinderSet& o) const;
    CylinderSet intersect(const CylinderSet& o) const;
    CylinderSet minus(const CylinderSet& o) const;
    // Image and preimage under the shift.
    CylinderSet image() const;
    CylinderSet preimage() const;

    std::string str() const;
    friend bool operator==(const CylinderSet& a, const CylinderSet& b) { return a.words_ == b.words_; }

private:
    void normalize();
    GraphPtr g_;
    std::vector<Word> words_;
};

std::vector<Word> children(const Graph& g, const Word& w);
// Partition of the boundary space into cylinders of length `level`, plus
// shorter cylinders of paths that end at a source.
std::vector<Word> atoms(const Graph& g, std::size_t level);
// A canonical boundary path inside Z(w), extending through the first edge of
// r^{-1} at each step (ending at a source or closing a cycle).
Path sample_path(const Graph& g, const Word& w);

}  // namespace xferop
