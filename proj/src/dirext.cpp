#include "simplexdir/dirext.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "simplexdir/angle.hpp"

namespace simplexdir {

RotationMatrix rotation_matrix(const SimplexPoint& x) {
  const Eigen::Vector3d root = x.coords().cwiseSqrt();
  RotationMatrix out;
  const double theta1 = std::acos(std::clamp(root[2], -1.0, 1.0));
  double phi1 = 0.0;
  if (root[0] == 0.0 && root[1] == 0.0) {
    out.pole_convention = true;  // x = (0,0,1): phi_1 undefined, fixed to 0
  } else {
    phi1 = arctan_star(root[0], root[1]);
  }
  const double ct = std::cos(theta1), st = std::sin(theta1);
  const double cp = std::cos(phi1), sp = std::sin(phi1);
  out.o << ct * cp, -sp, st * cp,
          ct * sp,  cp, st * sp,
          -st,     0.0, ct;
  return out;
}

DirectionObservation extract_direction(const SimplexPoint& x1, const SimplexPoint& x2) {
  const RotationMatrix op = rotation_matrix(x1);
  const Eigen::Vector3d rotated = op.o.transpose() * x2.coords().cwiseSqrt();
  const double theta2 = std::acos(std::clamp(rotated[2], -1.0, 1.0));
  if (std::hypot(rotated[0], rotated[1]) < 1e-12) {
    if (rotated[2] > 0.0) throw std::domain_error("extract_direction: degenerate movement");
    throw std::domain_error("extract_direction: antipodal movement");
  }
  DirectionObservation out;
  out.location = x1;
  out.direction = arctan_star(rotated[0], rotated[1]);
  out.magnitude = theta2;
  return out;
}

SimplexPoint apply_direction(const SimplexPoint& x1, double direction, double magnitude) {
  const RotationMatrix op = rotation_matrix(x1);
  const Eigen::Vector3d local(std::sin(magnitude) * std::cos(direction),
                              std::sin(magnitude) * std::sin(direction),
                              std::cos(magnitude));
  const Eigen::Vector3d v = op.o * local;
  for (int i = 0; i < 3; ++i)
    if (v[i] < 0.0)
      throw std::domain_error("apply_direction: movement leaves the nonnegative orthant");
  return SimplexPoint(v.cwiseProduct(v), 1e-6);
}

std::pair<std::vector<DirectionObservation>, int> dedup(
    const std::vector<DirectionObservation>& obs, double tol) {
  if (tol < 0.0) throw std::domain_error("dedup: negative tolerance");
  std::vector<DirectionObservation> kept;
  int removed = 0;
  for (const auto& o : obs) {
    bool dup = false;
    for (const auto& k : kept) {
      const Eigen::Vector3d d = (o.location.coords() - k.location.coords()).cwiseAbs();
      if (d.maxCoeff() <= tol) {
        dup = true;
        break;
      }
    }
    if (dup) ++removed;
    else kept.push_back(o);
  }
  return {kept, removed};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::domain_error("line " + std::to_string(line_no) + ": malformed " + what + " '" +
                             s + "'");
  }
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("load_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::domain_error("load_dataset: missing header in " + path);
  Dataset data;
  std::vector<SimplexPoint> locs;
  std::vector<double> dirs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4)
      throw std::domain_error("line " + std::to_string(line_no) + ": expected 4 columns");
    Eigen::Vector3d x(parse_double(f[0], line_no, "x1"), parse_double(f[1], line_no, "x2"),
                      parse_double(f[2], line_no, "x3"));
    for (int i = 0; i < 3; ++i)
      if (x[i] < 0.0)
        throw std::domain_error("line " + std::to_string(line_no) + ": negative proportion");
    if (std::abs(x.sum() - 1.0) > 1e-6)
      throw std::domain_error("line " + std::to_string(line_no) +
                               ": proportions do not sum to 1");
    const double y = parse_double(f[3], line_no, "y");
    if (y < 0.0 || y >= kTwoPi)
      throw std::domain_error("line " + std::to_string(line_no) +
                               ": direction outside [0, 2pi)");
    locs.emplace_back(x / x.sum(), 1e-6);
    dirs.push_back(y);
  }
  data.locations = std::move(locs);
  data.directions = Eigen::Map<Eigen::VectorXd>(dirs.data(), static_cast<int>(dirs.size()));
  return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  out.precision(17);
  out << "x1,x2,x3,y\n";
  for (int i = 0; i < data.n(); ++i) {
    const auto& x = data.locations[i].coords();
    out << x[0] << ',' << x[1] << ',' << x[2] << ',' << data.directions[i] << '\n';
  }
}

std::vector<std::pair<SimplexPoint, SimplexPoint>> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("load_pairs: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::domain_error("load_pairs: missing header in " + path);
  std::vector<std::pair<SimplexPoint, SimplexPoint>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6)
      throw std::domain_error("line " + std::to_string(line_no) + ": expected 6 columns");
    Eigen::Vector3d a, b;
    for (int i = 0; i < 3; ++i) a[i] = parse_double(f[i], line_no, "xa");
    for (int i = 0; i < 3; ++i) b[i] = parse_double(f[3 + i], line_no, "xb");
    for (int i = 0; i < 3; ++i)
      if (a[i] < 0.0 || b[i] < 0.0)
        throw std::domain_error("line " + std::to_string(line_no) + ": negative proportion");
    if (std::abs(a.sum() - 1.0) > 1e-6 || std::abs(b.sum() - 1.0) > 1e-6)
      throw std::domain_error("line " + std::to_string(line_no) +
                               ": proportions do not sum to 1");
    out.emplace_back(SimplexPoint(a / a.sum(), 1e-6), SimplexPoint(b / b.sum(), 1e-6));
  }
  return out;
}

void write_directions(const std::string& path, const std::vector<DirectionObservation>& obs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_directions: cannot open " + path);
  out.precision(17);
  out << "x1,x2,x3,y,magnitude\n";
  for (const auto& o : obs) {
    const auto& x = o.location.coords();
    out << x[0] << ',' << x[1] << ',' << x[2] << ',' << o.direction << ',' << o.magnitude << '\n';
  }
}

}  // namespace simplexdir
