#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcor/model.hpp"
#include "pcor/term.hpp"

namespace pcor {

// ---------------------------------------------------------------------------
// Graphs with bi-interface over Sigma plus fork/join hyperedges.
// A fork has one source and two ordered targets, a join two ordered sources
// and one target; plain edges are 1-1. Vertices are 0..n-1.
// ---------------------------------------------------------------------------

constexpr int FORK = -1;
constexpr int JOIN = -2;

struct BgEdge {
  int label;  // symbol id, or FORK/JOIN
  std::vector<int> src, dst;
};

struct BiGraph {
  int n = 0;
  std::vector<BgEdge> edges;
  std::vector<int> srcs, dsts;  // interface lists (types ty1, ty2)

  static BiGraph single_edge(int label);  // 2 vertices, one labeled edge
  static BiGraph identity(int k);         // 1^k
  static BiGraph fork_edge();             // <1,2>: one f-edge
  static BiGraph join_edge();             // <2,1>: one j-edge
};

// series composition: merges g1's targets with g2's sources pairwise
BiGraph series(const BiGraph& g1, const BiGraph& g2);
BiGraph parallel(const BiGraph& g1, const BiGraph& g2);
BiGraph mirror(const BiGraph& g);  // swaps the two interface lists

// interface-preserving homomorphism g -> h (edges map to equal-label edges)
bool hom_exists(const BiGraph& g, const BiGraph& h);
// all such homomorphisms, as vertex maps
std::vector<std::vector<int>> hom_all(const BiGraph& g, const BiGraph& h);

bool bigraph_isomorphic(const BiGraph& a, const BiGraph& b);
// invariant-based bucket key for cheap deduplication
std::string bigraph_bucket_key(const BiGraph& g);
// removes isomorphic duplicates, keeping first occurrences (stable)
void dedup_isomorphic(std::vector<BiGraph>& gs);

std::string bigraph_to_dot(const BiGraph& g, const std::string& name = "g");
std::string bigraph_to_json(const BiGraph& g);

// a graph without fork/join edges viewed as a pointed structure; vertex i is
// named "v<i>"; `extra_names` become empty relations (so eval is total)
Structure bigraph_as_structure(const BiGraph& g, const std::vector<std::string>& extra_names);

// ---------------------------------------------------------------------------
// graph languages with witness decompositions built alongside generation
// ---------------------------------------------------------------------------

struct PathWitness {
  std::vector<std::vector<int>> bags;
};

struct TreeWitness {
  std::vector<std::vector<int>> bags;
  std::vector<int> parent;  // parent[b] = -1 for the root
  int root = 0;
};

struct LangGraph {
  BiGraph g;
  PathWitness path;  // width <= iw(t), first bag holds sources, last targets
  TreeWitness tree;  // width <= 2, root bag holds sources and targets
};

// the graph language of a complement-free term, stars unfolded to <= d
// iterations; deduplicated up to isomorphism when `dedup` (default on)
std::vector<LangGraph> glang_witnessed(Term t, int star_depth, bool dedup = true);
std::vector<BiGraph> glang(Term t, int star_depth, bool dedup = true);

// path/tree witness validity (cover, interval resp. connected-subtree,
// anchoring, width bound)
bool check_path_witness(const BiGraph& g, const PathWitness& w, int max_width,
                        std::string* why = nullptr);
bool check_tree_witness(const BiGraph& g, const TreeWitness& w, int max_width,
                        std::string* why = nullptr);

// the run language of a KL term (runs = graphs over Sigma+{f,j})
std::vector<BiGraph> run_lang(Term t, int star_depth, bool dedup = true);

// word language over {vars,1,0,T,;,+,&,*}: T yields all words of length <= d
// over the alphabet of the whole term
std::vector<std::vector<int>> word_lang(Term t, int star_depth);

// ---------------------------------------------------------------------------
// runs
// ---------------------------------------------------------------------------

// the two run invariants: DAG edge-successor relation and unit fan-in/out
bool is_run(const BiGraph& g, std::string* why = nullptr);
// series-parallel recognizer for <1,1> runs (series cuts and matched
// fork/join brackets all the way down)
bool is_sp_run(const BiGraph& g);

struct AtomicRun {
  enum Kind { Var, Fork, Join } kind;
  int label = -1;      // Var only
  int width = 0;       // superscript: Var both sides, Fork source, Join target
  int pos = 0;         // 1-based tentacle position
  // Sigma-run decorations (empty for plain runs)
  std::vector<int> src_labels;  // structure vertices across the source interface
  int tgt_label = -1;           // Var: the new vertex at position pos

  bool operator==(const AtomicRun& o) const {
    return kind == o.kind && label == o.label && width == o.width && pos == o.pos &&
           src_labels == o.src_labels && tgt_label == o.tgt_label;
  }
};

BiGraph atomic_to_bigraph(const AtomicRun& a);

// frontier-greedy atomic decomposition; series-fold of the result is
// isomorphic to the input; edge-free runs yield the empty sequence; throws
// when no next atom applies
std::vector<AtomicRun> decompose_atomic(const BiGraph& run);

// left quotient: all s with p composed-before s isomorphic to r
std::vector<BiGraph> left_quotient(const BiGraph& r, const BiGraph& p);

// ---------------------------------------------------------------------------
// runs on structures
// ---------------------------------------------------------------------------

struct SRun {
  BiGraph run;
  std::vector<int> map;  // run vertex -> structure vertex
};

// the f/j-augmented structure graph with <1,1> interface (x, y)
BiGraph structure_run_target(const Structure& s, int x, int y);

// all homomorphisms of `run` into structure_run_target(s, x, y)
std::vector<SRun> enumerate_sruns(const Structure& s, int x, int y, const BiGraph& run);

// Sigma-run atomic decomposition: label vectors tracked along the frontier
std::vector<AtomicRun> decompose_atomic_srun(const SRun& r);

// ---------------------------------------------------------------------------
// exact graph-language oracle
// ---------------------------------------------------------------------------

struct OracleResult {
  enum Kind { Valid, Invalid, ValidUpToDepth } kind;
  std::optional<BiGraph> counter;  // Invalid only
  int depth = 0;
};

// for each G in glang(t1,d): test (source,target) in eval(G-as-structure, t2);
// exact and final iff t1 is star-free (t2's stars are evaluated exactly)
OracleResult oracle_leq(Term t1, Term t2, int star_depth, int jobs = 1);

}  // namespace pcor
