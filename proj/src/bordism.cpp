#include "eftlab/bordism.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

std::string kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::C: return "C";
    case AtomKind::L: return "L";
    case AtomKind::R: return "R";
    case AtomKind::T: return "T";
    case AtomKind::Id: return "Id";
    case AtomKind::Swap: return "Swap";
  }
  throw std::logic_error("bad kind");
}

AtomKind kind_from_name(const std::string& n) {
  if (n == "C") return AtomKind::C;
  if (n == "L") return AtomKind::L;
  if (n == "R") return AtomKind::R;
  if (n == "T") return AtomKind::T;
  if (n == "Id") return AtomKind::Id;
  if (n == "Swap") return AtomKind::Swap;
  throw std::invalid_argument("unknown atom kind: " + n);
}

namespace {

mpq_class frac_mod1(const mpq_class& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpq_class r = x - fl;
  r.canonicalize();
  return r;
}

GaussQ norm_tau(const GaussQ& t) { return {frac_mod1(t.re), t.im}; }

}  // namespace

Atom Atom::make(AtomKind k, GaussQ tau, std::optional<int> spin) {
  Atom a;
  a.kind = k;
  a.spin = spin;
  if (k == AtomKind::Id || k == AtomKind::Swap) {
    a.tau = GaussQ(0, 0);
    return a;
  }
  tau.re.canonicalize();
  tau.im.canonicalize();
  a.tau = norm_tau(tau);
  if ((k == AtomKind::R || k == AtomKind::T) && !(a.tau.im > 0))
    throw std::domain_error(kind_name(k) + " requires im(tau) > 0");
  if (a.tau.im < 0)
    throw std::domain_error(kind_name(k) + " requires im(tau) >= 0");
  return a;
}

long Atom::in_arity() const {
  switch (kind) {
    case AtomKind::C: case AtomKind::Id: return 1;
    case AtomKind::L: case AtomKind::Swap: return 2;
    default: return 0;
  }
}

long Atom::out_arity() const {
  switch (kind) {
    case AtomKind::C: case AtomKind::Id: return 1;
    case AtomKind::R: case AtomKind::Swap: return 2;
    default: return kind == AtomKind::L || kind == AtomKind::T ? 0 : 0;
  }
}

bool Atom::has_tau() const {
  return kind == AtomKind::C || kind == AtomKind::L || kind == AtomKind::R ||
         kind == AtomKind::T;
}

bool Atom::operator==(const Atom& o) const {
  return kind == o.kind && spin == o.spin && (!has_tau() || tau == o.tau);
}

long BordWord::in_arity() const {
  if (layers.empty()) return 0;
  long n = 0;
  for (const Atom& a : layers.front()) n += a.in_arity();
  return n;
}

long BordWord::out_arity() const {
  if (layers.empty()) return 0;
  long n = 0;
  for (const Atom& a : layers.back()) n += a.out_arity();
  return n;
}

size_t BordWord::atom_count() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.size();
  return n;
}

GaussQ BordWord::tau_sum() const {
  GaussQ s(0, 0);
  for (const auto& l : layers)
    for (const Atom& a : l)
      if (a.has_tau()) s = s + a.tau;
  return s;
}

bool BordWord::operator==(const BordWord& o) const { return layers == o.layers; }

std::string BordWord::to_json() const {
  json j;
  json jl = json::array();
  for (const auto& layer : layers) {
    json ja = json::array();
    for (const Atom& a : layer) {
      json je;
      je["kind"] = kind_name(a.kind);
      if (a.has_tau()) je["tau"] = a.tau.to_string();
      if (a.spin) je["spin"] = *a.spin == 0 ? "+" : "-";
      ja.push_back(je);
    }
    jl.push_back(ja);
  }
  j["layers"] = std::move(jl);
  return j.dump(2);
}

BordWord BordWord::from_json(const std::string& text) {
  json j = json::parse(text);
  BordWord w;
  for (const auto& jl : j.at("layers")) {
    std::vector<Atom> layer;
    for (const auto& je : jl) {
      AtomKind k = kind_from_name(je.at("kind").get<std::string>());
      GaussQ tau(0, 0);
      if (je.contains("tau")) tau = GaussQ::parse(je.at("tau").get<std::string>());
      std::optional<int> spin;
      if (je.contains("spin")) {
        std::string s = je.at("spin").get<std::string>();
        if (s != "+" && s != "-") throw std::invalid_argument("bad spin tag: " + s);
        spin = s == "+" ? 0 : 1;
      }
      layer.push_back(Atom::make(k, tau, spin));
    }
    w.layers.push_back(std::move(layer));
  }
  return w;
}

TypecheckResult typecheck(const BordWord& w) {
  TypecheckResult res;
  if (w.layers.empty()) {
    res.ok = false;
    res.message = "empty word";
    return res;
  }
  std::optional<int> spin;
  long prev_out = -1;
  for (size_t i = 0; i < w.layers.size(); ++i) {
    long in = 0, out = 0;
    for (const Atom& a : w.layers[i]) {
      in += a.in_arity();
      out += a.out_arity();
      if (a.spin) {
        if (spin && *spin != *a.spin) {
          res.ok = false;
          res.layer = i;
          res.message = "mixed spin tags; composition across spin sectors is ill-typed";
          return res;
        }
        spin = a.spin;
      }
    }
    if (i > 0) {
      if (prev_out != in) {
        res.ok = false;
        res.layer = i;
        res.message = "arity mismatch: layer " + std::to_string(i - 1) + " emits " +
                      std::to_string(prev_out) + " circles, layer " +
                      std::to_string(i) + " expects " + std::to_string(in);
        return res;
      }
      if (in == 0) {
        // a closed piece followed by another piece is a disjoint union
        // written in sequence, not a composition
        res.ok = false;
        res.layer = i;
        res.message = "0-circle interior interface: 0->m cannot follow n->0";
        return res;
      }
    }
    prev_out = out;
  }
  return res;
}

// ---------------------------------------------------------------------------
// wire graph

namespace {

struct PortRef {
  int node = -1;  // -1: word boundary
  int slot = 0;
};

struct Wire {
  PortRef from, to;
  bool alive = true;
};

struct Node {
  AtomKind kind;
  GaussQ tau{0, 0};
  std::vector<int> in_w, out_w;
  bool alive = true;
};

struct Graph {
  std::vector<Node> nodes;
  std::vector<Wire> wires;
  std::vector<int> in_boundary, out_boundary;  // wire ids at the word boundary

  void set_from(int w, PortRef p) {
    wires[w].from = p;
    if (p.node >= 0)
      nodes[p.node].out_w[p.slot] = w;
  }
  void set_to(int w, PortRef p) {
    wires[w].to = p;
    if (p.node >= 0)
      nodes[p.node].in_w[p.slot] = w;
    else
      out_boundary[p.slot] = w;
  }
};

Graph build_graph(const BordWord& w) {
  Graph g;
  std::vector<int> iface;  // current interface, wire ids left to right
  for (long p = 0; p < w.in_arity(); ++p) {
    g.wires.push_back({{-1, static_cast<int>(p)}, {}, true});
    iface.push_back(static_cast<int>(g.wires.size()) - 1);
  }
  g.in_boundary = iface;
  for (const auto& layer : w.layers) {
    std::vector<int> next;
    size_t pos = 0;
    for (const Atom& a : layer) {
      int n = static_cast<int>(g.nodes.size());
      Node node;
      node.kind = a.kind;
      node.tau = a.tau;
      for (long s = 0; s < a.in_arity(); ++s) {
        int wid = iface.at(pos++);
        node.in_w.push_back(wid);
        g.wires[wid].to = {n, static_cast<int>(s)};
      }
      for (long s = 0; s < a.out_arity(); ++s) {
        g.wires.push_back({{n, static_cast<int>(s)}, {}, true});
        int wid = static_cast<int>(g.wires.size()) - 1;
        node.out_w.push_back(wid);
        next.push_back(wid);
      }
      g.nodes.push_back(std::move(node));
    }
    iface = std::move(next);
  }
  g.out_boundary = iface;
  for (size_t p = 0; p < g.out_boundary.size(); ++p)
    g.wires[g.out_boundary[p]].to = {-1, static_cast<int>(p)};
  return g;
}

// Splices Id (pass-through) and Swap (symmetry is natural in the target, so
// a crossing only re-routes wires); counts one step per spliced node.
size_t splice_trivial(Graph& g) {
  size_t steps = 0;
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    Node& node = g.nodes[n];
    if (!node.alive) continue;
    if (node.kind == AtomKind::Id) {
      int a = node.in_w[0], b = node.out_w[0];
      g.set_to(a, g.wires[b].to);
      g.wires[b].alive = false;
      node.alive = false;
      ++steps;
    } else if (node.kind == AtomKind::Swap) {
      int a0 = node.in_w[0], a1 = node.in_w[1];
      int b0 = node.out_w[0], b1 = node.out_w[1];
      g.set_to(a0, g.wires[b1].to);
      g.set_to(a1, g.wires[b0].to);
      g.wires[b0].alive = false;
      g.wires[b1].alive = false;
      node.alive = false;
      ++steps;
    }
  }
  return steps;
}

// One pairwise fusion along an atom-to-atom wire; true if something fused.
bool fuse_once(Graph& g) {
  for (size_t wi = 0; wi < g.wires.size(); ++wi) {
    Wire& w = g.wires[wi];
    if (!w.alive || w.from.node < 0 || w.to.node < 0) continue;
    Node& s = g.nodes[w.from.node];
    Node& t = g.nodes[w.to.node];
    if (w.from.node == w.to.node) {
      // self-loop on a C: the trace of q^k, i.e. a torus
      s.kind = AtomKind::T;
      s.in_w.clear();
      s.out_w.clear();
      w.alive = false;
      return true;
    }
    GaussQ sum = s.tau + t.tau;
    if (s.kind == AtomKind::C && t.kind == AtomKind::C) {
      s.tau = sum;
      g.set_from(t.out_w[0], {w.from.node, 0});
      s.out_w[0] = t.out_w[0];
      w.alive = false;
      t.alive = false;
      return true;
    }
    if (s.kind == AtomKind::C && t.kind == AtomKind::L) {
      t.tau = sum;
      g.set_to(s.in_w[0], {w.to.node, w.to.slot});
      w.alive = false;
      s.alive = false;
      return true;
    }
    if (s.kind == AtomKind::R && t.kind == AtomKind::C) {
      s.tau = sum;
      g.set_from(t.out_w[0], {w.from.node, w.from.slot});
      w.alive = false;
      t.alive = false;
      return true;
    }
    if (s.kind == AtomKind::R && t.kind == AtomKind::L) {
      int other_out = s.out_w[1 - w.from.slot];
      bool closed = g.wires[other_out].to.node == w.to.node;
      if (closed) {
        s.kind = AtomKind::T;
        s.tau = sum;
        g.wires[other_out].alive = false;
        w.alive = false;
        s.in_w.clear();
        s.out_w.clear();
        t.alive = false;
        return true;
      }
      // snake: the L's other input becomes the C input, the R's other
      // output stays as the C output
      int other_in = t.in_w[1 - w.to.slot];
      s.kind = AtomKind::C;
      s.tau = sum;
      s.out_w = {other_out};
      s.in_w = {other_in};
      g.set_from(other_out, {w.from.node, 0});
      g.set_to(other_in, {w.from.node, 0});
      w.alive = false;
      t.alive = false;
      return true;
    }
  }
  return false;
}

struct ComponentInfo {
  std::optional<int> node;          // surviving node, if any
  std::vector<long> in_ports, out_ports;
  int bare_out = -1;                // for bare wires: output port
};

// After full fusion every component is one node or a bare boundary wire.
std::vector<StructuralEval::Component> collect_components(const Graph& g) {
  std::vector<StructuralEval::Component> comps;
  std::vector<char> seen(g.nodes.size(), 0);
  // bare wires: boundary to boundary
  for (size_t p = 0; p < g.in_boundary.size(); ++p) {
    const Wire& w = g.wires[g.in_boundary[p]];
    if (!w.alive || w.to.node >= 0) continue;
    StructuralEval::Component c;
    c.shape = AtomKind::Id;
    c.tau = GaussQ(0, 0);
    c.in_ports = {static_cast<long>(p)};
    c.out_ports = {static_cast<long>(w.to.slot)};
    comps.push_back(std::move(c));
  }
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    const Node& node = g.nodes[n];
    if (!node.alive) continue;
    StructuralEval::Component c;
    c.shape = node.kind;
    c.tau = norm_tau(node.tau);
    for (int wid : node.in_w) {
      const Wire& w = g.wires[wid];
      if (w.from.node >= 0) throw std::logic_error("unfused wire");
      c.in_ports.push_back(w.from.slot);
    }
    for (int wid : node.out_w) {
      const Wire& w = g.wires[wid];
      if (w.to.node >= 0) throw std::logic_error("unfused wire");
      c.out_ports.push_back(w.to.slot);
    }
    // lambda and rho are symmetric (relations L.swap = L, swap.R = R), so
    // port order within a component is immaterial; sort it away
    std::sort(c.in_ports.begin(), c.in_ports.end());
    std::sort(c.out_ports.begin(), c.out_ports.end());
    comps.push_back(std::move(c));
  }
  return comps;
}

// Layers of Id/Swap realizing the rearrangement of `from` into `to`
// (both are sequences of the same distinct labels), one adjacent
// transposition per layer.
std::vector<std::vector<Atom>> perm_layers(std::vector<long> from,
                                           const std::vector<long>& to) {
  std::vector<std::vector<Atom>> out;
  for (size_t target = 0; target < to.size(); ++target) {
    auto it = std::find(from.begin() + target, from.end(), to[target]);
    size_t pos = static_cast<size_t>(it - from.begin());
    while (pos > target) {
      std::vector<Atom> layer;
      for (size_t i = 0; i + 1 < pos; ++i) layer.push_back(Atom::make(AtomKind::Id));
      layer.push_back(Atom::make(AtomKind::Swap));
      for (size_t i = pos + 1; i < from.size(); ++i)
        layer.push_back(Atom::make(AtomKind::Id));
      out.push_back(std::move(layer));
      std::swap(from[pos - 1], from[pos]);
      --pos;
    }
  }
  return out;
}

}  // namespace

NormalizeResult normalize(const BordWord& w) {
  NormalizeResult res;
  TypecheckResult tc = typecheck(w);
  if (!tc.ok) {
    res.message = "typecheck failed: " + tc.message;
    return res;
  }
  const size_t budget = 10 * w.atom_count() + 10;
  Graph g = build_graph(w);
  res.steps = splice_trivial(g);
  while (fuse_once(g)) {
    if (++res.steps > budget) {
      res.message = "step budget exceeded";
      return res;
    }
  }
  std::vector<StructuralEval::Component> comps;
  try {
    comps = collect_components(g);
  } catch (const std::logic_error& e) {
    res.message = e.what();
    return res;
  }
  // deterministic order: by first input port, then first output port;
  // closed components last
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    auto key = [](const StructuralEval::Component& c) {
      long i = c.in_ports.empty() ? LONG_MAX : c.in_ports.front();
      long o = c.out_ports.empty() ? LONG_MAX : c.out_ports.front();
      return std::pair<long, long>{i, o};
    };
    return key(a) < key(b);
  });
  std::vector<long> in_seq, out_seq;
  std::vector<Atom> mid;
  for (const auto& c : comps) {
    in_seq.insert(in_seq.end(), c.in_ports.begin(), c.in_ports.end());
    out_seq.insert(out_seq.end(), c.out_ports.begin(), c.out_ports.end());
    mid.push_back(Atom::make(c.shape, c.tau));
  }
  std::vector<long> ident_in(in_seq.size()), ident_out(out_seq.size());
  std::iota(ident_in.begin(), ident_in.end(), 0);
  std::iota(ident_out.begin(), ident_out.end(), 0);
  BordWord nw;
  for (auto& layer : perm_layers(ident_in, in_seq)) nw.layers.push_back(std::move(layer));
  nw.layers.push_back(std::move(mid));
  for (auto& layer : perm_layers(out_seq, ident_out)) nw.layers.push_back(std::move(layer));
  // postcondition: the tau budget is conserved exactly (re mod 1)
  GaussQ before = w.tau_sum(), after = nw.tau_sum();
  if (before.im != after.im || frac_mod1(before.re) != frac_mod1(after.re)) {
    res.message = "tau-sum postcondition violated: input " + before.to_string() +
                  ", output " + after.to_string();
    return res;
  }
  res.ok = true;
  res.word = std::move(nw);
  return res;
}

// ---------------------------------------------------------------------------
// rewrite_step: layered pattern matching for the seven relation rules

namespace {

struct Placed {
  size_t index;   // position in the layer
  long in_off;    // first input wire
  long out_off;   // first output wire
};

std::vector<Placed> place(const std::vector<Atom>& layer) {
  std::vector<Placed> out;
  long io = 0, oo = 0;
  for (size_t i = 0; i < layer.size(); ++i) {
    out.push_back({i, io, oo});
    io += layer[i].in_arity();
    oo += layer[i].out_arity();
  }
  return out;
}

// replaces layer[i] with the given atoms
void substitute(std::vector<Atom>& layer, size_t i, std::vector<Atom> atoms) {
  layer.erase(layer.begin() + static_cast<long>(i));
  layer.insert(layer.begin() + static_cast<long>(i), atoms.begin(), atoms.end());
}

bool all_id(const std::vector<Atom>& layer) {
  return std::all_of(layer.begin(), layer.end(),
                     [](const Atom& a) { return a.kind == AtomKind::Id; });
}

void cleanup(BordWord& w) {
  for (auto it = w.layers.begin(); it != w.layers.end();)
    it = (w.layers.size() > 1 && all_id(*it)) ? w.layers.erase(it) : std::next(it);
}

}  // namespace

RewriteResult rewrite_step(const BordWord& w, int rule_id) {
  RewriteResult res;
  res.word = w;
  auto& L = res.word.layers;
  for (size_t i = 0; i + 1 < L.size(); ++i) {
    auto up = place(L[i]);
    auto dn = place(L[i + 1]);
    auto find_dn = [&](long off, AtomKind k) -> const Placed* {
      for (const auto& p : dn)
        if (p.in_off == off && L[i + 1][p.index].kind == k) return &p;
      return nullptr;
    };
    for (const auto& p : up) {
      Atom& a = L[i][p.index];
      switch (rule_id) {
        case 1: {  // L o swap = L
          if (a.kind != AtomKind::Swap) break;
          const Placed* q = find_dn(p.out_off, AtomKind::L);
          if (!q) break;
          substitute(L[i], p.index, {Atom::make(AtomKind::Id), Atom::make(AtomKind::Id)});
          cleanup(res.word);
          res.applied = true;
          res.detail = "R1 at layer " + std::to_string(i);
          return res;
        }
        case 2: {  // swap o R = R
          if (a.kind != AtomKind::R) break;
          const Placed* q = find_dn(p.out_off, AtomKind::Swap);
          if (!q) break;
          substitute(L[i + 1], q->index,
                     {Atom::make(AtomKind::Id), Atom::make(AtomKind::Id)});
          cleanup(res.word);
          res.applied = true;
          res.detail = "R2 at layer " + std::to_string(i);
          return res;
        }
        case 3: {  // (id x L(t3) x id) o (R(t1) x R(t2)) = R(t1+t2+t3)
          if (a.kind != AtomKind::R) break;
          if (p.index + 1 >= L[i].size()) break;
          Atom& b = L[i][p.index + 1];
          if (b.kind != AtomKind::R) break;
          const Placed* qi = find_dn(p.out_off, AtomKind::Id);
          const Placed* ql = find_dn(p.out_off + 1, AtomKind::L);
          const Placed* qj = find_dn(p.out_off + 3, AtomKind::Id);
          if (!qi || !ql || !qj) break;
          GaussQ sum = a.tau + b.tau + L[i + 1][ql->index].tau;
          substitute(L[i + 1], ql->index, {Atom::make(AtomKind::Id)});
          substitute(L[i], p.index + 1, {});
          L[i][p.index] = Atom::make(AtomKind::R, sum);
          // the two interior wires are gone; drop one of the pass-throughs
          substitute(L[i + 1], qi->index, {});
          cleanup(res.word);
          res.applied = true;
          res.detail = "R3 at layer " + std::to_string(i);
          return res;
        }
        case 4: {  // snake: (id x L) o (R x id) = C, both orientations
          if (a.kind != AtomKind::R) break;
          // orientation A: [R, Id] then [Id, L]
          if (p.index + 1 < L[i].size() && L[i][p.index + 1].kind == AtomKind::Id) {
            const Placed* qi = find_dn(p.out_off, AtomKind::Id);
            const Placed* ql = find_dn(p.out_off + 1, AtomKind::L);
            if (qi && ql) {
              GaussQ sum = a.tau + L[i + 1][ql->index].tau;
              substitute(L[i + 1], ql->index, {});
              L[i + 1][qi->index] = Atom::make(AtomKind::Id);
              substitute(L[i], p.index, {Atom::make(AtomKind::C, sum)});
              L[i].erase(L[i].begin() + static_cast<long>(p.index) + 1);
              cleanup(res.word);
              res.applied = true;
              res.detail = "R4 at layer " + std::to_string(i);
              return res;
            }
          }
          // orientation B: [Id, R] then [L, Id]
          if (p.index > 0 && L[i][p.index - 1].kind == AtomKind::Id) {
            const Placed* ql = find_dn(p.out_off - 1, AtomKind::L);
            const Placed* qi = find_dn(p.out_off + 1, AtomKind::Id);
            if (ql && qi) {
              GaussQ sum = a.tau + L[i + 1][ql->index].tau;
              substitute(L[i + 1], ql->index, {Atom::make(AtomKind::Id)});
              substitute(L[i + 1], qi->index, {});
              substitute(L[i], p.index, {});
              L[i][p.index - 1] = Atom::make(AtomKind::C, sum);
              cleanup(res.word);
              res.applied = true;
              res.detail = "R4 at layer " + std::to_string(i);
              return res;
            }
          }
          break;
        }
        case 5: {  // L(t2) o (C(t1) x id) = L(t1+t2), either input
          if (a.kind != AtomKind::C) break;
          for (long slot = 0; slot < 2; ++slot) {
            const Placed* q = find_dn(p.out_off - slot, AtomKind::L);
            if (!q) continue;
            Atom& l = L[i + 1][q->index];
            l = Atom::make(AtomKind::L, a.tau + l.tau);
            L[i][p.index] = Atom::make(AtomKind::Id);
            cleanup(res.word);
            res.applied = true;
            res.detail = "R5 at layer " + std::to_string(i);
            return res;
          }
          break;
        }
        case 6: {  // L(t2) o R(t1) = T(t1+t2)
          if (a.kind != AtomKind::R) break;
          const Placed* q = find_dn(p.out_off, AtomKind::L);
          if (!q) break;
          GaussQ sum = a.tau + L[i + 1][q->index].tau;
          substitute(L[i + 1], q->index, {});
          substitute(L[i], p.index, {Atom::make(AtomKind::T, sum)});
          cleanup(res.word);
          res.applied = true;
          res.detail = "R6 at layer " + std::to_string(i);
          return res;
        }
        case 7: {  // C o C = C
          if (a.kind != AtomKind::C) break;
          const Placed* q = find_dn(p.out_off, AtomKind::C);
          if (!q) break;
          L[i][p.index] = Atom::make(AtomKind::C, a.tau + L[i + 1][q->index].tau);
          L[i + 1][q->index] = Atom::make(AtomKind::Id);
          cleanup(res.word);
          res.applied = true;
          res.detail = "R7 at layer " + std::to_string(i);
          return res;
        }
        default:
          throw std::invalid_argument("unknown rule id");
      }
    }
  }
  res.word = w;
  res.detail = "no match";
  return res;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

using CMat = std::vector<std::vector<std::complex<double>>>;

CMat matmul(const CMat& A, const CMat& B) {
  size_t n = A.size(), m = B.empty() ? 0 : B[0].size(), k = B.size();
  CMat C(n, std::vector<std::complex<double>>(m, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (A[i][l] == std::complex<double>(0.0)) continue;
      for (size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

CMat kron(const CMat& A, const CMat& B) {
  size_t ra = A.size(), ca = ra ? A[0].size() : 1;
  size_t rb = B.size(), cb = rb ? B[0].size() : 1;
  if (ra == 0) return B;  // 0x? treated as scalar 1 is wrong; callers use 1x1
  CMat C(ra * rb, std::vector<std::complex<double>>(ca * cb, 0.0));
  for (size_t i = 0; i < ra; ++i)
    for (size_t j = 0; j < ca; ++j)
      for (size_t k = 0; k < rb; ++k)
        for (size_t l = 0; l < cb; ++l)
          C[i * rb + k][j * cb + l] = A[i][j] * B[k][l];
  return C;
}

std::complex<double> q_pow_k(const GaussQ& tau, long k) {
  const std::complex<double> twopii(0.0, 2.0 * std::numbers::pi);
  return std::exp(twopii * tau.to_complex() * static_cast<double>(k));
}

}  // namespace

std::complex<double> EvalResult::scalar() const {
  if (in_arity != 0 || out_arity != 0)
    throw std::logic_error("scalar() requires a 0->0 word");
  return matrix.at(0).at(0) * scalar_factor;
}

EvalResult evaluate(const BordWord& w, const TheoryData& th, long max_dim) {
  TypecheckResult tc = typecheck(w);
  if (!tc.ok) throw std::invalid_argument("ill-typed word: " + tc.message);
  // basis of the truncated V
  std::vector<long> block_of;
  for (long k = -th.pole; k <= th.trunc; ++k) {
    mpz_class a = th.dim_at(k);
    if (a > max_dim) throw std::length_error("theory dimension exceeds bound");
    for (long i = 0; i < a.get_si(); ++i) block_of.push_back(k);
  }
  long D = static_cast<long>(block_of.size());
  long arity = w.in_arity();
  auto guard = [&](long a) {
    double dim = std::pow(static_cast<double>(D), static_cast<double>(a));
    if (dim > static_cast<double>(max_dim))
      throw std::length_error("tensor dimension exceeds bound");
  };
  guard(arity);
  CMat total;  // built lazily: identity on the input space
  bool have_total = false;
  for (const auto& layer : w.layers) {
    CMat layer_mat{{1.0}};
    long out_ar = 0;
    for (const Atom& a : layer) {
      CMat m;
      switch (a.kind) {
        case AtomKind::Id: {
          m.assign(static_cast<size_t>(D),
                   std::vector<std::complex<double>>(static_cast<size_t>(D), 0.0));
          for (long i = 0; i < D; ++i) m[i][i] = 1.0;
          break;
        }
        case AtomKind::C: {
          m.assign(static_cast<size_t>(D),
                   std::vector<std::complex<double>>(static_cast<size_t>(D), 0.0));
          for (long i = 0; i < D; ++i) m[i][i] = q_pow_k(a.tau, block_of[i]);
          break;
        }
        case AtomKind::Swap: {
          m.assign(static_cast<size_t>(D * D),
                   std::vector<std::complex<double>>(static_cast<size_t>(D * D), 0.0));
          for (long x = 0; x < D; ++x)
            for (long y = 0; y < D; ++y) m[y * D + x][x * D + y] = 1.0;
          break;
        }
        case AtomKind::L: {
          m.assign(1, std::vector<std::complex<double>>(static_cast<size_t>(D * D), 0.0));
          for (long i = 0; i < D; ++i) m[0][i * D + i] = q_pow_k(a.tau, block_of[i]);
          break;
        }
        case AtomKind::R: {
          m.assign(static_cast<size_t>(D * D), std::vector<std::complex<double>>(1, 0.0));
          for (long i = 0; i < D; ++i) m[i * D + i][0] = q_pow_k(a.tau, block_of[i]);
          break;
        }
        case AtomKind::T: {
          std::complex<double> s = 0.0;
          for (long k = -th.pole; k <= th.trunc; ++k)
            s += static_cast<double>(th.dim_at(k).get_d()) * q_pow_k(a.tau, k);
          m.assign(1, std::vector<std::complex<double>>(1, s));
          break;
        }
      }
      out_ar += a.out_arity();
      guard(out_ar);
      layer_mat = kron(layer_mat, m);
    }
    total = have_total ? matmul(layer_mat, total) : layer_mat;
    have_total = true;
  }
  EvalResult res;
  res.matrix = std::move(total);
  res.in_arity = w.in_arity();
  res.out_arity = w.out_arity();
  return res;
}

StructuralEval evaluate_structural(const BordWord& w, const TheoryData& th) {
  TypecheckResult tc = typecheck(w);
  if (!tc.ok) throw std::invalid_argument("ill-typed word: " + tc.message);
  Graph g = build_graph(w);
  splice_trivial(g);
  while (fuse_once(g)) {
  }
  StructuralEval ev;
  ev.components = collect_components(g);
  ev.in_arity = w.in_arity();
  ev.out_arity = w.out_arity();
  ev.th = &th;
  return ev;
}

std::complex<double> StructuralEval::entry(const Basis& in, const Basis& out) const {
  if (static_cast<long>(in.size()) != in_arity ||
      static_cast<long>(out.size()) != out_arity)
    throw std::invalid_argument("basis tuple arity mismatch");
  std::complex<double> v = 1.0;
  for (const auto& c : components) {
    switch (c.shape) {
      case AtomKind::Id:
        if (in[c.in_ports[0]] != out[c.out_ports[0]]) return 0.0;
        break;
      case AtomKind::C:
        if (in[c.in_ports[0]] != out[c.out_ports[0]]) return 0.0;
        v *= q_pow_k(c.tau, in[c.in_ports[0]].first);
        break;
      case AtomKind::L:
        if (in[c.in_ports[0]] != in[c.in_ports[1]]) return 0.0;
        v *= q_pow_k(c.tau, in[c.in_ports[0]].first);
        break;
      case AtomKind::R:
        if (out[c.out_ports[0]] != out[c.out_ports[1]]) return 0.0;
        v *= q_pow_k(c.tau, out[c.out_ports[0]].first);
        break;
      case AtomKind::T: {
        std::complex<double> s = 0.0;
        for (long k = -th->pole; k <= th->trunc; ++k)
          s += th->dim_at(k).get_d() * q_pow_k(c.tau, k);
        v *= s;
        break;
      }
      default:
        throw std::logic_error("unexpected component shape");
    }
  }
  return v;
}

std::complex<double> StructuralEval::scalar() const {
  if (in_arity != 0 || out_arity != 0)
    throw std::logic_error("scalar() requires a 0->0 word");
  return entry({}, {});
}

// ---------------------------------------------------------------------------
// random well-typed words by inverse rule application

namespace {

GaussQ random_tau(std::mt19937& rng, bool need_pos_im) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 4), inum(need_pos_im ? 1 : 0, 4);
  return {mpq_class(num(rng), den(rng)), mpq_class(inum(rng), den(rng))};
}

// splits tau = a + b with im(a) = im(b) = im(tau)/2 >= 0 and a random
// rational shuffle of the real parts
std::pair<GaussQ, GaussQ> split_tau(std::mt19937& rng, const GaussQ& tau) {
  std::uniform_int_distribution<int> num(-2, 2);
  GaussQ a(mpq_class(num(rng), 3), tau.im / 2);
  return {a, tau - a};
}

struct Spot {
  size_t layer, index;
  long in_off, out_off;
};

std::vector<Spot> atoms_of_kind(const BordWord& w, AtomKind k) {
  std::vector<Spot> out;
  for (size_t i = 0; i < w.layers.size(); ++i) {
    long io = 0, oo = 0;
    for (size_t j = 0; j < w.layers[i].size(); ++j) {
      const Atom& a = w.layers[i][j];
      if (a.kind == k) out.push_back({i, j, io, oo});
      io += a.in_arity();
      oo += a.out_arity();
    }
  }
  return out;
}

long layer_out_arity(const std::vector<Atom>& layer) {
  long n = 0;
  for (const Atom& a : layer) n += a.out_arity();
  return n;
}

// a full-Id layer matching the out-arity of w.layers[i], inserted after it
std::vector<Atom>* insert_id_layer_after(BordWord& w, size_t i) {
  std::vector<Atom> layer(static_cast<size_t>(layer_out_arity(w.layers[i])),
                          Atom::make(AtomKind::Id));
  w.layers.insert(w.layers.begin() + static_cast<long>(i) + 1, std::move(layer));
  return &w.layers[i + 1];
}

// replaces the id atoms covering wires [off, off+n) with the given atoms
void patch_layer(std::vector<Atom>& layer, long off, long n, std::vector<Atom> atoms) {
  layer.erase(layer.begin() + off, layer.begin() + off + n);
  layer.insert(layer.begin() + off, atoms.begin(), atoms.end());
}

}  // namespace

BordWord random_word(std::mt19937& rng, int growth_steps) {
  std::uniform_int_distribution<int> seed_pick(0, 3);
  BordWord w;
  AtomKind seeds[] = {AtomKind::C, AtomKind::L, AtomKind::R, AtomKind::T};
  AtomKind seed = seeds[seed_pick(rng)];
  w.layers.push_back({Atom::make(
      seed, random_tau(rng, seed == AtomKind::R || seed == AtomKind::T))});
  std::uniform_int_distribution<int> move_pick(0, 5);
  for (int step = 0; step < growth_steps; ++step) {
    int mv = move_pick(rng);
    auto pick = [&](const std::vector<Spot>& v) {
      std::uniform_int_distribution<size_t> d(0, v.size() - 1);
      return v[d(rng)];
    };
    switch (mv) {
      case 0: {  // C -> C.C (inverse R7)
        auto spots = atoms_of_kind(w, AtomKind::C);
        if (spots.empty()) break;
        Spot s = pick(spots);
        auto [t1, t2] = split_tau(rng, w.layers[s.layer][s.index].tau);
        w.layers[s.layer][s.index] = Atom::make(AtomKind::C, t1);
        auto* nl = insert_id_layer_after(w, s.layer);
        (*nl)[static_cast<size_t>(s.out_off)] = Atom::make(AtomKind::C, t2);
        break;
      }
      case 1: {  // C -> snake (inverse R4); needs im > 0 for the R part
        auto spots = atoms_of_kind(w, AtomKind::C);
        std::erase_if(spots, [&](const Spot& s) {
          return !(w.layers[s.layer][s.index].tau.im > 0);
        });
        if (spots.empty()) break;
        Spot s = pick(spots);
        auto [t1, t2] = split_tau(rng, w.layers[s.layer][s.index].tau);
        patch_layer(w.layers[s.layer], static_cast<long>(s.index), 1,
                    {Atom::make(AtomKind::R, t1), Atom::make(AtomKind::Id)});
        auto* nl = insert_id_layer_after(w, s.layer);
        patch_layer(*nl, s.out_off, 3,
                    {Atom::make(AtomKind::Id), Atom::make(AtomKind::L, t2)});
        break;
      }
      case 2: {  // L -> L o (C x id) (inverse R5)
        auto spots = atoms_of_kind(w, AtomKind::L);
        if (spots.empty()) break;
        Spot s = pick(spots);
        auto [t1, t2] = split_tau(rng, w.layers[s.layer][s.index].tau);
        w.layers[s.layer][s.index] = Atom::make(AtomKind::L, t2);
        // insert a layer before, with C on one of L's input wires
        std::vector<Atom> prev;
        long in_ar = 0;
        for (const Atom& a : w.layers[s.layer]) in_ar += a.in_arity();
        for (long p = 0; p < in_ar; ++p) prev.push_back(Atom::make(AtomKind::Id));
        std::uniform_int_distribution<int> which(0, 1);
        prev[static_cast<size_t>(s.in_off + which(rng))] = Atom::make(AtomKind::C, t1);
        w.layers.insert(w.layers.begin() + static_cast<long>(s.layer), std::move(prev));
        break;
      }
      case 3: {  // L -> L o swap (inverse R1)
        auto spots = atoms_of_kind(w, AtomKind::L);
        if (spots.empty()) break;
        Spot s = pick(spots);
        std::vector<Atom> prev;
        long in_ar = 0;
        for (const Atom& a : w.layers[s.layer]) in_ar += a.in_arity();
        for (long p = 0; p < in_ar; ++p) prev.push_back(Atom::make(AtomKind::Id));
        patch_layer(prev, s.in_off, 2, {Atom::make(AtomKind::Swap)});
        w.layers.insert(w.layers.begin() + static_cast<long>(s.layer), std::move(prev));
        break;
      }
      case 4: {  // T -> L o R (inverse R6)
        auto spots = atoms_of_kind(w, AtomKind::T);
        if (spots.empty()) break;
        Spot s = pick(spots);
        auto [t1, t2] = split_tau(rng, w.layers[s.layer][s.index].tau);
        patch_layer(w.layers[s.layer], static_cast<long>(s.index), 1,
                    {Atom::make(AtomKind::R, t1)});
        auto* nl = insert_id_layer_after(w, s.layer);
        patch_layer(*nl, s.out_off, 2, {Atom::make(AtomKind::L, t2)});
        break;
      }
      case 5: {  // R -> (id x L x id) o (R x R) (inverse R3)
        auto spots = atoms_of_kind(w, AtomKind::R);
        if (spots.empty()) break;
        Spot s = pick(spots);
        auto [t1, rest] = split_tau(rng, w.layers[s.layer][s.index].tau);
        auto [t2, t3] = split_tau(rng, rest);
        if (!(t2.im > 0)) break;  // keep R parameters in the upper half plane
        patch_layer(w.layers[s.layer], static_cast<long>(s.index), 1,
                    {Atom::make(AtomKind::R, t1), Atom::make(AtomKind::R, t2)});
        auto* nl = insert_id_layer_after(w, s.layer);
        patch_layer(*nl, s.out_off, 4,
                    {Atom::make(AtomKind::Id), Atom::make(AtomKind::L, t3),
                     Atom::make(AtomKind::Id)});
        break;
      }
    }
  }
  return w;
}

}  // namespace eftlab
