// Mesh text format (whitespace separated, '#' starts a comment line):
//
//   dbc-mesh 1
//   domain <name> <n_vertices>
//   <x> <y>                      (n_vertices lines)
//   nodes <n>
//   <x> <y>                      (n lines)
//   triangles <t>
//   <i> <j> <k>                  (t lines, counterclockwise)
//   boundary_edges <e>
//   <i> <j> <tag>                (e lines, counterclockwise along the boundary)
//   parents <p>
//   <node> <i> <j>               (p lines, one per refined node)
//   lineage <hash> <passes>

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "dbc/error.hpp"
#include "dbc/mesh.hpp"

namespace dbc {

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  const auto old_precision = out.precision(17);
  const PolygonalDomain& d = mesh.domain();
  out << "dbc-mesh 1\n";
  out << "domain " << d.name() << ' ' << d.num_vertices() << '\n';
  for (const Point& p : d.vertices()) out << p.x << ' ' << p.y << '\n';
  out << "nodes " << mesh.n_nodes() << '\n';
  for (const Point& p : mesh.nodes()) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.n_triangles() << '\n';
  for (const Triangle& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary_edges " << mesh.boundary_edges().size() << '\n';
  for (const BoundaryEdge& e : mesh.boundary_edges()) out << e.a << ' ' << e.b << ' ' << e.tag << '\n';
  std::size_t n_refined = 0;
  for (const NodePair& p : mesh.parents()) n_refined += p.a >= 0 ? 1 : 0;
  out << "parents " << n_refined << '\n';
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    const NodePair p = mesh.parents()[i];
    if (p.a >= 0) out << i << ' ' << p.a << ' ' << p.b << '\n';
  }
  out << "lineage " << mesh.lineage() << ' ' << mesh.passes() << '\n';
  out.precision(old_precision);
}

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void expect(const std::string& keyword) {
    const std::string word = next_word();
    if (word != keyword) fail("expected '" + keyword + "', found '" + word + "'");
  }

  template <class T>
  T read() {
    const std::string word = next_word();
    std::istringstream ss(word);
    T value{};
    ss >> value;
    if (!ss || !ss.eof()) fail("cannot parse '" + word + "'");
    return value;
  }

  std::string next_word() {
    std::string word;
    while (true) {
      if (!(in_ >> word)) fail("unexpected end of file");
      if (word[0] != '#') return word;
      in_.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    }
  }

  [[noreturn]] void fail(const std::string& msg) { throw IoError("mesh file: " + msg); }

 private:
  std::istream& in_;
};

}  // namespace

TriMesh read_mesh(std::istream& in) {
  Reader r(in);
  r.expect("dbc-mesh");
  if (r.read<int>() != 1) r.fail("unsupported format version");
  r.expect("domain");
  std::string name = r.next_word();
  const auto nv = r.read<std::size_t>();
  std::vector<Point> vertices(nv);
  for (Point& p : vertices) p = {r.read<double>(), r.read<double>()};
  auto domain = std::make_shared<const PolygonalDomain>(PolygonalDomain::from_vertices(name, std::move(vertices)));

  r.expect("nodes");
  std::vector<Point> nodes(r.read<std::size_t>());
  for (Point& p : nodes) p = {r.read<double>(), r.read<double>()};
  r.expect("triangles");
  std::vector<Triangle> triangles(r.read<std::size_t>());
  for (Triangle& t : triangles) t = {r.read<int>(), r.read<int>(), r.read<int>()};
  r.expect("boundary_edges");
  std::vector<BoundaryEdge> boundary(r.read<std::size_t>());
  for (BoundaryEdge& e : boundary) e = {r.read<int>(), r.read<int>(), r.read<int>()};
  r.expect("parents");
  const auto n_refined = r.read<std::size_t>();
  std::vector<NodePair> parents(nodes.size());
  for (std::size_t k = 0; k < n_refined; ++k) {
    const auto i = r.read<std::size_t>();
    if (i >= nodes.size()) r.fail("parent entry for missing node");
    parents[i] = {r.read<int>(), r.read<int>()};
  }
  r.expect("lineage");
  const auto lineage = r.read<std::uint64_t>();
  const auto passes = r.read<int>();
  return TriMesh(std::move(domain), std::move(nodes), std::move(triangles), std::move(boundary), std::move(parents),
                 lineage, passes);
}

}  // namespace dbc
