#include "bwc/pebbling.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bwc {

void validate_graph(const PebbleGraph& g) {
  std::unordered_set<std::string> ids;
  for (const auto& v : g.vertices)
    if (!ids.insert(v).second)
      throw Error("duplicate vertex '" + v + "'");
  int n = static_cast<int>(g.vertices.size());
  std::set<std::pair<int, int>> seen;
  std::vector<int> outdeg(n, 0), indeg(n, 0);
  for (auto [a, b] : g.edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw Error("edge references an unknown vertex");
    if (a == b) throw Error("self-loop on '" + g.vertices[a] + "'");
    if (!seen.insert({a, b}).second)
      throw Error("duplicate edge '" + g.vertices[a] + "' -> '" +
                  g.vertices[b] + "'");
    ++outdeg[a];
    ++indeg[b];
  }
  if (g.sink < 0 || g.sink >= n) throw Error("missing sink");
  for (int v = 0; v < n; ++v) {
    if (v == g.sink && outdeg[v] != 0)
      throw Error("sink '" + g.vertices[v] + "' has outgoing edges");
    if (v != g.sink && outdeg[v] == 0)
      throw Error("vertex '" + g.vertices[v] +
                  "' is a second sink (out-degree 0)");
  }
  // Kahn: no cycles
  std::vector<int> deg = indeg, q;
  for (int v = 0; v < n; ++v)
    if (deg[v] == 0) q.push_back(v);
  std::vector<std::vector<int>> succs(n);
  for (auto [a, b] : g.edges) succs[a].push_back(b);
  size_t done = 0;
  while (!q.empty()) {
    int v = q.back();
    q.pop_back();
    ++done;
    for (int s : succs[v])
      if (--deg[s] == 0) q.push_back(s);
  }
  if (done != static_cast<size_t>(n)) throw Error("graph has a cycle");
}

PebbleGraph parse_pebble_graph(const std::string& text) {
  PebbleGraph g;
  std::unordered_map<std::string, int> index_of;
  struct Line {
    std::vector<std::string> toks;
    int no;
  };
  std::vector<Line> lines;
  {
    std::stringstream ss(text);
    std::string raw;
    int no = 0;
    while (std::getline(ss, raw)) {
      ++no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.resize(hash);
      std::stringstream ls(raw);
      Line l;
      l.no = no;
      std::string t;
      while (ls >> t) l.toks.push_back(t);
      if (!l.toks.empty()) lines.push_back(std::move(l));
    }
  }
  auto fail = [](const Line& l, const std::string& msg) -> void {
    throw ParseError(msg, l.no, 1);
  };
  for (const Line& l : lines) {
    if (l.toks[0] != "vertex") continue;
    if (l.toks.size() != 2) fail(l, "malformed vertex line");
    if (index_of.count(l.toks[1]))
      fail(l, "duplicate vertex '" + l.toks[1] + "'");
    index_of[l.toks[1]] = static_cast<int>(g.vertices.size());
    g.vertices.push_back(l.toks[1]);
  }
  auto resolve = [&](const Line& l, const std::string& id) -> int {
    auto it = index_of.find(id);
    if (it == index_of.end()) fail(l, "unknown vertex '" + id + "'");
    return it->second;
  };
  bool have_sink = false;
  for (const Line& l : lines) {
    if (l.toks[0] == "vertex") continue;
    if (l.toks[0] == "edge") {
      if (l.toks.size() != 3) fail(l, "malformed edge line");
      g.edges.emplace_back(resolve(l, l.toks[1]), resolve(l, l.toks[2]));
    } else if (l.toks[0] == "sink") {
      if (l.toks.size() != 2) fail(l, "malformed sink line");
      if (have_sink) fail(l, "duplicate sink line");
      g.sink = resolve(l, l.toks[1]);
      have_sink = true;
    } else {
      fail(l, "unrecognized line '" + l.toks[0] + "'");
    }
  }
  validate_graph(g);
  return g;
}

std::string serialize(const PebbleGraph& g) {
  std::ostringstream out;
  for (const auto& v : g.vertices) out << "vertex " << v << "\n";
  for (auto [a, b] : g.edges)
    out << "edge " << g.vertices[a] << " " << g.vertices[b] << "\n";
  out << "sink " << g.vertices[g.sink] << "\n";
  return out.str();
}

namespace {

const char* move_text(MoveKind k) {
  switch (k) {
    case MoveKind::PlaceBlack: return "B+";
    case MoveKind::RemoveBlack: return "B-";
    case MoveKind::PlaceWhite: return "W+";
    case MoveKind::RemoveWhite: return "W-";
  }
  return "?";
}

}  // namespace

Pebbling parse_pebbling(const std::string& text, const PebbleGraph& g) {
  std::unordered_map<std::string, int> index_of;
  for (size_t i = 0; i < g.vertices.size(); ++i)
    index_of[g.vertices[i]] = static_cast<int>(i);
  Pebbling p;
  std::stringstream ss(text);
  std::string raw;
  int no = 0;
  while (std::getline(ss, raw)) {
    ++no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::stringstream ls(raw);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError("malformed move line", no, 1);
    MoveKind k;
    if (toks[0] == "B+") k = MoveKind::PlaceBlack;
    else if (toks[0] == "B-") k = MoveKind::RemoveBlack;
    else if (toks[0] == "W+") k = MoveKind::PlaceWhite;
    else if (toks[0] == "W-") k = MoveKind::RemoveWhite;
    else throw ParseError("unknown move '" + toks[0] + "'", no, 1);
    auto it = index_of.find(toks[1]);
    if (it == index_of.end())
      throw ParseError("unknown vertex '" + toks[1] + "'", no, 1);
    p.moves.push_back({k, it->second});
  }
  return p;
}

std::string serialize(const Pebbling& p, const PebbleGraph& g) {
  std::ostringstream out;
  for (const Move& m : p.moves)
    out << move_text(m.kind) << " " << g.vertices[m.vertex] << "\n";
  return out.str();
}

std::optional<Violation> validate_pebbling(const PebbleGraph& g,
                                           const Pebbling& p,
                                           PebbleMode mode) {
  int n = static_cast<int>(g.vertices.size());
  std::vector<std::vector<int>> preds(n);
  for (auto [a, b] : g.edges) preds[b].push_back(a);
  std::vector<char> black(n, 0), white(n, 0);

  auto pebbled = [&](int v) { return black[v] || white[v]; };
  auto preds_pebbled = [&](int v) {
    for (int u : preds[v])
      if (!pebbled(u)) return false;
    return true;
  };

  for (size_t t = 0; t < p.moves.size(); ++t) {
    const Move& m = p.moves[t];
    if (m.vertex < 0 || m.vertex >= n)
      throw Error("move " + std::to_string(t) + " references an unknown vertex");
    const std::string& name = g.vertices[m.vertex];
    int idx = static_cast<int>(t);
    if (mode == PebbleMode::Black && (m.kind == MoveKind::PlaceWhite ||
                                      m.kind == MoveKind::RemoveWhite))
      return Violation{idx, m.kind == MoveKind::PlaceWhite ? 3 : 4,
                       "white move on '" + name + "' in black mode"};
    switch (m.kind) {
      case MoveKind::PlaceBlack:
        if (pebbled(m.vertex))
          return Violation{idx, 1, "'" + name + "' is already pebbled"};
        if (!preds_pebbled(m.vertex))
          return Violation{idx, 1,
                           "a predecessor of '" + name + "' is unpebbled"};
        black[m.vertex] = 1;
        break;
      case MoveKind::RemoveBlack:
        if (!black[m.vertex])
          return Violation{idx, 2, "no black pebble on '" + name + "'"};
        black[m.vertex] = 0;
        break;
      case MoveKind::PlaceWhite:
        if (pebbled(m.vertex))
          return Violation{idx, 3, "'" + name + "' is already pebbled"};
        white[m.vertex] = 1;
        break;
      case MoveKind::RemoveWhite:
        if (!white[m.vertex])
          return Violation{idx, 4, "no white pebble on '" + name + "'"};
        if (!preds_pebbled(m.vertex))
          return Violation{idx, 4,
                           "a predecessor of '" + name + "' is unpebbled"};
        white[m.vertex] = 0;
        break;
    }
  }
  for (int v = 0; v < n; ++v) {
    bool want_black = v == g.sink;
    if (black[v] != want_black || white[v])
      return Violation{static_cast<int>(p.moves.size()), 0,
                       "final configuration is not a single black pebble on "
                       "the sink"};
  }
  return std::nullopt;
}

Measures measures(const Pebbling& p) {
  std::unordered_map<int, char> color;  // vertex -> 'b'/'w'
  Measures ms;
  ms.time = static_cast<int>(p.moves.size());
  size_t peak = 0;
  for (size_t t = 0; t < p.moves.size(); ++t) {
    const Move& m = p.moves[t];
    bool place =
        m.kind == MoveKind::PlaceBlack || m.kind == MoveKind::PlaceWhite;
    char c = (m.kind == MoveKind::PlaceBlack || m.kind == MoveKind::RemoveBlack)
                 ? 'b'
                 : 'w';
    auto it = color.find(m.vertex);
    if (place) {
      if (it != color.end())
        throw Error("move " + std::to_string(t) +
                    " places a pebble on an occupied vertex");
      color.emplace(m.vertex, c);
    } else {
      if (it == color.end() || it->second != c)
        throw Error("move " + std::to_string(t) +
                    " removes a pebble that is not there");
      color.erase(it);
    }
    peak = std::max(peak, color.size());
  }
  ms.space = static_cast<int>(peak);
  return ms;
}

namespace {

struct SearchState {
  uint32_t black;
  uint32_t white;
};

}  // namespace

std::optional<SearchResult> search_min_space(const PebbleGraph& g,
                                             PebbleMode mode, int space_cap,
                                             int vertex_cap) {
  validate_graph(g);
  int n = static_cast<int>(g.vertices.size());
  if (vertex_cap == 0)
    vertex_cap = mode == PebbleMode::Black ? 14 : 10;
  if (n > vertex_cap)
    throw Error("graph too large for exhaustive search (" + std::to_string(n) +
                " vertices > cap " + std::to_string(vertex_cap) + ")");
  if (space_cap == 0) space_cap = n;

  std::vector<uint32_t> predmask(n, 0);
  for (auto [a, b] : g.edges) predmask[b] |= uint32_t{1} << a;
  const uint32_t goal_black = uint32_t{1} << g.sink;

  auto key = [](uint32_t b, uint32_t w) {
    return (uint64_t{b} << 32) | w;
  };

  for (int bound = 1; bound <= space_cap; ++bound) {
    std::deque<SearchState> queue;
    std::unordered_map<uint64_t, std::pair<uint64_t, Move>> parent;
    std::unordered_set<uint64_t> visited;
    queue.push_back({0, 0});
    visited.insert(key(0, 0));

    auto found = [&](uint64_t goal_key) {
      std::vector<Move> moves;
      uint64_t k = goal_key;
      while (k != key(0, 0)) {
        auto& [pk, mv] = parent.at(k);
        moves.push_back(mv);
        k = pk;
      }
      std::reverse(moves.begin(), moves.end());
      return SearchResult{bound, Pebbling{std::move(moves)}};
    };

    while (!queue.empty()) {
      SearchState s = queue.front();
      queue.pop_front();
      uint64_t skey = key(s.black, s.white);
      uint32_t occupied = s.black | s.white;

      // expansion order fixes the lexicographic tie-break
      for (int kind = 0; kind < 4; ++kind) {
        if (mode == PebbleMode::Black && kind >= 2) break;
        for (int v = 0; v < n; ++v) {
          uint32_t bit = uint32_t{1} << v;
          uint32_t nb = s.black, nw = s.white;
          switch (kind) {
            case 0:  // B+
              if ((occupied & bit) || (predmask[v] & ~occupied)) continue;
              nb |= bit;
              break;
            case 1:  // B-
              if (!(s.black & bit)) continue;
              nb &= ~bit;
              break;
            case 2:  // W+
              if (occupied & bit) continue;
              nw |= bit;
              break;
            case 3:  // W-
              if (!(s.white & bit) || (predmask[v] & ~occupied)) continue;
              nw &= ~bit;
              break;
          }
          if (std::popcount(nb | nw) > bound) continue;
          uint64_t nkey = key(nb, nw);
          if (!visited.insert(nkey).second) continue;
          parent.emplace(nkey,
                         std::make_pair(skey, Move{static_cast<MoveKind>(kind), v}));
          if (nb == goal_black && nw == 0) return found(nkey);
          queue.push_back({nb, nw});
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

GeneratedStrategy make_path(int len) {
  GeneratedStrategy out;
  for (int i = 1; i <= len; ++i)
    out.graph.vertices.push_back("v" + std::to_string(i));
  for (int i = 0; i + 1 < len; ++i) out.graph.edges.emplace_back(i, i + 1);
  out.graph.sink = len - 1;
  auto& mv = out.pebbling.moves;
  mv.push_back({MoveKind::PlaceBlack, 0});
  for (int i = 1; i < len; ++i) {
    mv.push_back({MoveKind::PlaceBlack, i});
    mv.push_back({MoveKind::RemoveBlack, i - 1});
  }
  return out;
}

GeneratedStrategy make_tree(int h) {
  GeneratedStrategy out;
  int n = (1 << (h + 1)) - 1;
  for (int k = 1; k <= n; ++k)
    out.graph.vertices.push_back("t" + std::to_string(k));
  for (int k = 2; k <= n; ++k)
    out.graph.edges.emplace_back(k - 1, k / 2 - 1);  // child -> parent
  out.graph.sink = 0;
  auto& mv = out.pebbling.moves;
  auto pebble = [&](auto&& self, int k) -> void {
    if (2 * k > n) {
      mv.push_back({MoveKind::PlaceBlack, k - 1});
      return;
    }
    self(self, 2 * k);
    self(self, 2 * k + 1);
    mv.push_back({MoveKind::PlaceBlack, k - 1});
    mv.push_back({MoveKind::RemoveBlack, 2 * k - 1});
    mv.push_back({MoveKind::RemoveBlack, 2 * k});
  };
  pebble(pebble, 1);
  return out;
}

GeneratedStrategy make_pyramid(int h) {
  GeneratedStrategy out;
  // index of p<i>_<j>: rows bottom-up, row i holds h+1-i vertices
  std::vector<std::vector<int>> at(h + 1);
  for (int i = 0; i <= h; ++i) {
    for (int j = 0; j <= h - i; ++j) {
      at[i].push_back(static_cast<int>(out.graph.vertices.size()));
      out.graph.vertices.push_back("p" + std::to_string(i) + "_" +
                                   std::to_string(j));
    }
  }
  for (int i = 1; i <= h; ++i)
    for (int j = 0; j <= h - i; ++j) {
      out.graph.edges.emplace_back(at[i - 1][j], at[i][j]);
      out.graph.edges.emplace_back(at[i - 1][j + 1], at[i][j]);
    }
  out.graph.sink = at[h][0];
  auto& mv = out.pebbling.moves;
  for (int j = 0; j <= h; ++j) mv.push_back({MoveKind::PlaceBlack, at[0][j]});
  for (int i = 1; i <= h; ++i) {
    for (int j = 0; j <= h - i; ++j) {
      mv.push_back({MoveKind::PlaceBlack, at[i][j]});
      mv.push_back({MoveKind::RemoveBlack, at[i - 1][j]});
    }
    mv.push_back({MoveKind::RemoveBlack, at[i - 1][h - i + 1]});
  }
  return out;
}

}  // namespace

GeneratedStrategy generate_strategy(StrategyFamily family, int param) {
  GeneratedStrategy out;
  switch (family) {
    case StrategyFamily::Path:
      if (param < 1) throw Error("path length must be >= 1");
      out = make_path(param);
      break;
    case StrategyFamily::BinaryTree:
      if (param < 0) throw Error("tree height must be >= 0");
      out = make_tree(param);
      break;
    case StrategyFamily::Pyramid:
      if (param < 0) throw Error("pyramid height must be >= 0");
      out = make_pyramid(param);
      break;
  }
  validate_graph(out.graph);
  if (auto v = validate_pebbling(out.graph, out.pebbling, PebbleMode::Black))
    throw Error("generated strategy is invalid: " + v->message);
  return out;
}

}  // namespace bwc
