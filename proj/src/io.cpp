#include "planekit/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace planekit {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, "missing file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "bad number '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

// Sequential reader over an in-memory binary payload.
class Cursor {
 public:
  Cursor(const std::string& data, std::size_t pos) : data_(data), pos_(pos) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw Error(ErrorCode::UnexpectedEof, "unexpected EOF");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::string& data_;
  std::size_t pos_;
};

// Header tokens of PNM/PFM files: whitespace separated, '#' comments, one
// whitespace byte after the last token.
std::vector<std::string> pnm_header(const std::string& data, int tokens, std::size_t& pos) {
  std::vector<std::string> out;
  pos = 0;
  while (int(out.size()) < tokens) {
    while (pos < data.size() && (std::isspace(static_cast<unsigned char>(data[pos])) || data[pos] == '#')) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        ++pos;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos == start) throw Error(ErrorCode::UnexpectedEof, "unexpected EOF");
    out.emplace_back(data.substr(start, pos - start));
  }
  if (pos >= data.size()) throw Error(ErrorCode::UnexpectedEof, "unexpected EOF");
  ++pos;
  return out;
}

std::string pfm_header(const char* magic, int w, int h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
}

struct PfmData {
  int width = 0, height = 0, channels = 0;
  std::vector<float> values;  // top-down rows
};

PfmData read_pfm(const fs::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const auto h = pnm_header(data, 4, pos);
  PfmData out;
  if (h[0] == "PF") {
    out.channels = 3;
  } else if (h[0] == "Pf") {
    out.channels = 1;
  } else {
    throw Error(ErrorCode::Parse, "not a PFM file: " + path.string());
  }
  out.width = int(parse_int(h[1]));
  out.height = int(parse_int(h[2]));
  const double scale = parse_double(h[3]);
  if (out.width <= 0 || out.height <= 0 || scale == 0.0) throw Error(ErrorCode::Parse, "bad PFM header");
  const std::size_t row = std::size_t(out.width) * out.channels;
  out.values.resize(row * out.height);
  Cursor cur(data, pos);
  for (int y = out.height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) {
      std::uint32_t bits = cur.get<std::uint32_t>();
      if (scale > 0.0) bits = __builtin_bswap32(bits);
      float f;
      std::memcpy(&f, &bits, 4);
      out.values[std::size_t(y) * row + i] = f;
    }
  }
  return out;
}

}  // namespace

void write_pfm(const fs::path& path, const NormalMap& normals) {
  std::string out = pfm_header("PF", normals.width, normals.height);
  for (int y = normals.height - 1; y >= 0; --y) {
    for (int x = 0; x < normals.width; ++x) {
      const auto& n = normals.at(x, y);
      for (int c = 0; c < 3; ++c) put(out, n[c]);
    }
  }
  write_file(path, out);
}

NormalMap read_normal_pfm(const fs::path& path) {
  const PfmData d = read_pfm(path);
  if (d.channels != 3) throw Error(ErrorCode::Schema, "expected a colour PFM: " + path.string());
  NormalMap m(d.width, d.height);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = Eigen::Vector3f(d.values[3 * i], d.values[3 * i + 1], d.values[3 * i + 2]);
  }
  return m;
}

void write_pfm(const fs::path& path, const DepthMap& depth) {
  std::string out = pfm_header("Pf", depth.width, depth.height);
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x) put(out, depth.at(x, y));
  }
  write_file(path, out);
}

DepthMap read_depth_pfm(const fs::path& path) {
  const PfmData d = read_pfm(path);
  if (d.channels != 1) throw Error(ErrorCode::Schema, "expected a greyscale PFM: " + path.string());
  DepthMap m(d.width, d.height);
  m.data = d.values;
  return m;
}

void write_pgm(const fs::path& path, const LabelImage& labels) {
  std::string out = "P5\n" + std::to_string(labels.width) + " " + std::to_string(labels.height) + "\n65535\n";
  for (int v : labels.labels) {
    if (v < 0 || v > 65535) throw Error(ErrorCode::InvalidArgument, "label out of 16-bit range");
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char(v & 0xff));
  }
  write_file(path, out);
}

LabelImage read_pgm(const fs::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const auto h = pnm_header(data, 4, pos);
  if (h[0] != "P5") throw Error(ErrorCode::Parse, "not a binary PGM: " + path.string());
  const int w = int(parse_int(h[1])), hh = int(parse_int(h[2]));
  const long long maxval = parse_int(h[3]);
  if (w <= 0 || hh <= 0 || maxval <= 0 || maxval > 65535) throw Error(ErrorCode::Parse, "bad PGM header");
  LabelImage img(w, hh);
  Cursor cur(data, pos);
  for (auto& v : img.labels) {
    if (maxval < 256) {
      v = cur.get<std::uint8_t>();
    } else {
      const int hi = cur.get<std::uint8_t>();
      v = (hi << 8) | cur.get<std::uint8_t>();
    }
  }
  return img;
}

// --- PLY ---------------------------------------------------------------------

namespace {

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

PlyType ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::I8;
  if (s == "uchar" || s == "uint8") return PlyType::U8;
  if (s == "short" || s == "int16") return PlyType::I16;
  if (s == "ushort" || s == "uint16") return PlyType::U16;
  if (s == "int" || s == "int32") return PlyType::I32;
  if (s == "uint" || s == "uint32") return PlyType::U32;
  if (s == "float" || s == "float32") return PlyType::F32;
  if (s == "double" || s == "float64") return PlyType::F64;
  throw Error(ErrorCode::Parse, "unknown PLY type '" + s + "'");
}

double read_binary(Cursor& c, PlyType t) {
  switch (t) {
    case PlyType::I8: return c.get<std::int8_t>();
    case PlyType::U8: return c.get<std::uint8_t>();
    case PlyType::I16: return c.get<std::int16_t>();
    case PlyType::U16: return c.get<std::uint16_t>();
    case PlyType::I32: return c.get<std::int32_t>();
    case PlyType::U32: return c.get<std::uint32_t>();
    case PlyType::F32: return c.get<float>();
    case PlyType::F64: return c.get<double>();
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::F32;
  bool list = false;
  PlyType count_type = PlyType::U8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

// Token source for the ASCII body.
class Tokens {
 public:
  Tokens(const std::string& data, std::size_t pos) : data_(data), pos_(pos) {}
  double next() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (pos_ == start) throw Error(ErrorCode::UnexpectedEof, "unexpected EOF");
    return parse_double(std::string_view(data_).substr(start, pos_ - start));
  }

 private:
  const std::string& data_;
  std::size_t pos_;
};

Face to_face(const std::vector<double>& idx) {
  if (idx.size() != 3) throw Error(ErrorCode::Parse, "only triangle faces are supported");
  return {int(idx[0]), int(idx[1]), int(idx[2])};
}

}  // namespace

const std::vector<double>* PlyData::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return &columns[i];
  }
  return nullptr;
}

PlyData read_ply(const fs::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) throw Error(ErrorCode::UnexpectedEof, "unexpected EOF");
    std::string line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return line;
  };
  if (next_line() != "ply") throw Error(ErrorCode::Parse, "not a PLY file: " + path.string());
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw Error(ErrorCode::Parse, "bad PLY format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        throw Error(ErrorCode::Parse, "unsupported PLY format '" + std::string(tok[1]) + "'");
      }
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw Error(ErrorCode::Parse, "bad PLY element line");
      elements.push_back({std::string(tok[1]), std::size_t(parse_int(tok[2])), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw Error(ErrorCode::Parse, "PLY property before element");
      PlyProperty p;
      if (tok.size() == 5 && tok[1] == "list") {
        p.list = true;
        p.count_type = ply_type(std::string(tok[2]));
        p.type = ply_type(std::string(tok[3]));
        p.name = tok[4];
      } else if (tok.size() == 3) {
        p.type = ply_type(std::string(tok[1]));
        p.name = tok[2];
      } else {
        throw Error(ErrorCode::Parse, "bad PLY property line");
      }
      elements.back().props.push_back(p);
    } else {
      throw Error(ErrorCode::Parse, "unexpected PLY header line '" + line + "'");
    }
  }

  PlyData out;
  Cursor cur(data, pos);
  Tokens tokens(data, pos);
  auto value = [&](PlyType t) { return binary ? read_binary(cur, t) : tokens.next(); };
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    if (is_vertex) {
      for (const PlyProperty& p : el.props) {
        if (p.list) throw Error(ErrorCode::Parse, "list property on vertex element");
        out.names.push_back(p.name);
        out.columns.emplace_back();
        out.columns.back().reserve(el.count);
      }
    }
    if (is_face) out.faces.reserve(el.count);
    std::vector<double> list;
    for (std::size_t i = 0; i < el.count; ++i) {
      for (std::size_t k = 0; k < el.props.size(); ++k) {
        const PlyProperty& p = el.props[k];
        if (!p.list) {
          const double v = value(p.type);
          if (is_vertex) out.columns[k].push_back(v);
          continue;
        }
        const double n = value(p.count_type);
        if (n < 0) throw Error(ErrorCode::Parse, "negative PLY list length");
        list.clear();
        for (std::size_t j = 0; j < std::size_t(n); ++j) list.push_back(value(p.type));
        if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) out.faces.push_back(to_face(list));
      }
    }
  }
  return out;
}

namespace {

std::string ply_header(bool binary, std::size_t nv, const std::vector<std::pair<std::string, const char*>>& props,
                       std::optional<std::size_t> nf) {
  std::string h = "ply\nformat ";
  h += binary ? "binary_little_endian 1.0\n" : "ascii 1.0\n";
  h += "element vertex " + std::to_string(nv) + "\n";
  for (const auto& [name, type] : props) h += std::string("property ") + type + " " + name + "\n";
  if (nf) h += "element face " + std::to_string(*nf) + "\nproperty list uchar int vertex_indices\n";
  h += "end_header\n";
  return h;
}

Points3 ply_points(const PlyData& ply) {
  const auto* x = ply.column("x");
  const auto* y = ply.column("y");
  const auto* z = ply.column("z");
  if (!x || !y || !z) throw Error(ErrorCode::Schema, "PLY vertices lack x, y, z");
  Points3 pts(x->size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = Vec3((*x)[i], (*y)[i], (*z)[i]);
  return pts;
}

std::string extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

}  // namespace

void save_mesh(const TriMesh& mesh, const fs::path& path, MeshFormat format) {
  mesh.validate();
  std::string out;
  if (format == MeshFormat::Obj) {
    for (const Vec3& v : mesh.vertices) {
      out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
    }
    for (const Face& f : mesh.faces) {
      out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
    }
    write_file(path, out);
    return;
  }
  const bool binary = format == MeshFormat::PlyBinary;
  std::vector<std::pair<std::string, const char*>> props{{"x", "double"}, {"y", "double"}, {"z", "double"}};
  if (mesh.has_labels()) props.emplace_back("plane_id", "int");
  out = ply_header(binary, mesh.vertices.size(), props, mesh.faces.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    if (binary) {
      for (int c = 0; c < 3; ++c) put(out, v[c]);
      if (mesh.has_labels()) put(out, std::int32_t(mesh.plane_id[i]));
    } else {
      out += format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
      if (mesh.has_labels()) out += " " + std::to_string(mesh.plane_id[i]);
      out += "\n";
    }
  }
  for (const Face& f : mesh.faces) {
    if (binary) {
      put(out, std::uint8_t(3));
      for (int v : f) put(out, std::int32_t(v));
    } else {
      out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
    }
  }
  write_file(path, out);
}

TriMesh load_mesh(const fs::path& path) {
  TriMesh mesh;
  const std::string ext = extension(path);
  if (ext == ".obj") {
    const std::string data = read_file(path);
    std::istringstream in(data);
    std::string line;
    while (std::getline(in, line)) {
      const auto tok = split_ws(line);
      if (tok.empty()) continue;
      if (tok[0] == "v") {
        if (tok.size() < 4) throw Error(ErrorCode::Parse, "bad OBJ vertex line");
        mesh.vertices.emplace_back(parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]));
      } else if (tok[0] == "f") {
        std::vector<int> idx;
        for (std::size_t i = 1; i < tok.size(); ++i) {
          const std::string_view t = tok[i].substr(0, tok[i].find('/'));
          long long k = parse_int(t);
          k = k < 0 ? static_cast<long long>(mesh.vertices.size()) + k : k - 1;
          idx.push_back(int(k));
        }
        if (idx.size() < 3) throw Error(ErrorCode::Parse, "OBJ face with fewer than 3 vertices");
        for (std::size_t i = 1; i + 1 < idx.size(); ++i) mesh.faces.push_back({idx[0], idx[i], idx[i + 1]});
      }
    }
  } else if (ext == ".ply") {
    const PlyData ply = read_ply(path);
    mesh.vertices = ply_points(ply);
    mesh.faces = ply.faces;
    if (const auto* l = ply.column("plane_id")) {
      mesh.plane_id.reserve(l->size());
      for (double v : *l) mesh.plane_id.push_back(int(v));
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown mesh extension '" + ext + "'");
  }
  mesh.validate();
  return mesh;
}

void save_cloud(const PointCloud& cloud, const fs::path& path, MeshFormat format) {
  if (format == MeshFormat::Obj) throw Error(ErrorCode::InvalidArgument, "point clouds are written as PLY");
  for (const auto& [name, col] : cloud.labels) {
    if (col.size() != cloud.points.size()) throw Error(ErrorCode::DimensionMismatch, "label column '" + name + "' length");
  }
  const bool binary = format == MeshFormat::PlyBinary;
  std::vector<std::pair<std::string, const char*>> props{{"x", "double"}, {"y", "double"}, {"z", "double"}};
  for (const auto& [name, col] : cloud.labels) props.emplace_back(name, "int");
  std::string out = ply_header(binary, cloud.points.size(), props, std::nullopt);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (binary) {
      for (int c = 0; c < 3; ++c) put(out, p[c]);
      for (const auto& [name, col] : cloud.labels) put(out, std::int32_t(col[i]));
    } else {
      out += format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z());
      for (const auto& [name, col] : cloud.labels) out += " " + std::to_string(col[i]);
      out += "\n";
    }
  }
  write_file(path, out);
}

PointCloud load_cloud(const fs::path& path) {
  const PlyData ply = read_ply(path);
  PointCloud cloud;
  cloud.points = ply_points(ply);
  for (std::size_t k = 0; k < ply.names.size(); ++k) {
    const std::string& n = ply.names[k];
    if (n == "x" || n == "y" || n == "z") continue;
    auto& col = cloud.labels[n];
    col.reserve(ply.columns[k].size());
    for (double v : ply.columns[k]) col.push_back(int(v));
  }
  return cloud;
}

// --- cameras / planes ----------------------------------------------------------

void write_cameras(const fs::path& path, const std::vector<Camera>& cameras) {
  std::string out = "# fx fy cx cy r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz width height\n";
  for (const Camera& c : cameras) {
    std::vector<double> v{c.fx, c.fy, c.cx, c.cy};
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) v.push_back(c.rotation(r, k));
    }
    for (int k = 0; k < 3; ++k) v.push_back(c.translation[k]);
    for (double x : v) out += format_double(x) + " ";
    out += std::to_string(c.width) + " " + std::to_string(c.height) + "\n";
  }
  write_file(path, out);
}

std::vector<Camera> read_cameras(const fs::path& path) {
  const std::string data = read_file(path);
  std::istringstream in(data);
  std::string line;
  std::vector<Camera> cams;
  while (std::getline(in, line)) {
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok.size() != 18) throw Error(ErrorCode::Parse, "camera record needs 18 fields");
    Camera c;
    c.fx = parse_double(tok[0]);
    c.fy = parse_double(tok[1]);
    c.cx = parse_double(tok[2]);
    c.cy = parse_double(tok[3]);
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) c.rotation(r, k) = parse_double(tok[4 + 3 * r + k]);
    }
    for (int k = 0; k < 3; ++k) c.translation[k] = parse_double(tok[13 + k]);
    c.width = int(parse_int(tok[16]));
    c.height = int(parse_int(tok[17]));
    c.validate();
    cams.push_back(c);
  }
  return cams;
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::Schema, "expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json parse_json(const fs::path& path) {
  const std::string data = read_file(path);
  try {
    return json::parse(data);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace

void write_planes(const fs::path& path, const std::vector<PlaneRecord>& planes) {
  json arr = json::array();
  for (const PlaneRecord& p : planes) {
    arr.push_back({{"id", p.id},
                   {"normal", vec_json(p.plane.normal)},
                   {"offset", p.plane.offset},
                   {"basis", json::array({vec_json(p.basis.f1), vec_json(p.basis.f2), vec_json(p.basis.f3)})},
                   {"support", p.support},
                   {"inliers", p.inliers}});
  }
  write_file(path, json{{"planes", arr}}.dump(2) + "\n");
}

std::vector<PlaneRecord> read_planes(const fs::path& path) {
  const json j = parse_json(path);
  std::vector<PlaneRecord> out;
  try {
    for (const json& e : j.at("planes")) {
      PlaneRecord p;
      p.id = e.at("id").get<int>();
      p.plane.normal = json_vec(e.at("normal"));
      p.plane.offset = e.at("offset").get<double>();
      const json& b = e.at("basis");
      if (!b.is_array() || b.size() != 3) throw Error(ErrorCode::Schema, "basis needs three points");
      p.basis = {json_vec(b[0]), json_vec(b[1]), json_vec(b[2])};
      p.support = e.at("support").get<std::size_t>();
      p.inliers = e.at("inliers").get<std::size_t>();
      out.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
  return out;
}

// --- manifest ----------------------------------------------------------------

void save_manifest(const fs::path& dir, const SceneManifest& m) {
  json views = json::array();
  for (const ViewFiles& v : m.views) {
    views.push_back({{"normal", v.normal}, {"depth", v.depth}, {"instances", v.instances}, {"planes", v.planes}});
  }
  json params = {{"alpha", m.alpha}, {"sigma", m.sigma}, {"delta", m.delta}, {"seeds", m.seeds}};
  params["grid_spacing"] = m.grid_spacing ? json(*m.grid_spacing) : json(nullptr);
  const json j = {{"format", "planekit-scene"}, {"version", 1},         {"params", params},
                  {"cameras", m.cameras},       {"views", views},       {"files", m.files}};
  fs::create_directories(dir);
  write_file(dir / kManifestName, j.dump(2) + "\n");
}

SceneManifest load_manifest(const fs::path& dir) {
  const json j = parse_json(dir / kManifestName);
  SceneManifest m;
  try {
    if (j.at("format").get<std::string>() != "planekit-scene") throw Error(ErrorCode::Schema, "unknown manifest format");
    if (j.at("version").get<int>() != 1) throw Error(ErrorCode::Schema, "unsupported manifest version");
    const json& p = j.at("params");
    m.alpha = p.at("alpha").get<double>();
    m.sigma = p.at("sigma").get<int>();
    m.delta = p.at("delta").get<double>();
    if (p.contains("grid_spacing") && !p["grid_spacing"].is_null()) m.grid_spacing = p["grid_spacing"].get<double>();
    if (p.contains("seeds")) m.seeds = p["seeds"].get<std::map<std::string, std::uint64_t>>();
    m.cameras = j.at("cameras").get<std::string>();
    for (const json& v : j.at("views")) {
      m.views.push_back({v.at("normal").get<std::string>(), v.at("depth").get<std::string>(),
                         v.at("instances").get<std::string>(), v.value("planes", std::string())});
    }
    m.files = j.at("files").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("manifest: ") + e.what());
  }
  if (!(m.alpha > 0.0 && m.alpha < 1.0) || m.sigma < 0 || !(m.delta > 0.0)) {
    throw Error(ErrorCode::Schema, "manifest parameters out of range");
  }
  if (m.grid_spacing && !(*m.grid_spacing > 0.0)) throw Error(ErrorCode::Schema, "grid_spacing must be positive");

  auto require = [&](const std::string& rel) {
    if (!rel.empty() && !fs::exists(dir / rel)) throw Error(ErrorCode::MissingFile, "missing file: " + rel);
  };
  if (!m.views.empty() && m.cameras.empty()) throw Error(ErrorCode::Schema, "views without a camera file");
  require(m.cameras);
  for (const ViewFiles& v : m.views) {
    require(v.normal);
    require(v.depth);
    require(v.instances);
    require(v.planes);
  }
  for (const auto& [name, rel] : m.files) require(rel);
  return m;
}

SceneBundle load_scene(const fs::path& dir) {
  SceneBundle b;
  b.dir = dir;
  b.manifest = load_manifest(dir);
  const SceneManifest& m = b.manifest;
  if (!m.cameras.empty()) {
    const auto cams = read_cameras(dir / m.cameras);
    if (cams.size() != m.views.size()) throw Error(ErrorCode::DimensionMismatch, "camera count differs from view count");
    for (std::size_t i = 0; i < cams.size(); ++i) {
      ViewData v;
      v.camera = cams[i];
      const ViewFiles& f = m.views[i];
      auto check = [&](int w, int h, const std::string& what) {
        if (w != v.camera.width || h != v.camera.height) {
          throw Error(ErrorCode::DimensionMismatch, "view " + std::to_string(i) + ": " + what + " size differs from camera");
        }
      };
      if (!f.normal.empty()) {
        v.normals = read_normal_pfm(dir / f.normal);
        check(v.normals->width, v.normals->height, "normal map");
      }
      if (!f.depth.empty()) {
        v.depth = read_depth_pfm(dir / f.depth);
        check(v.depth->width, v.depth->height, "depth map");
      }
      if (!f.instances.empty()) {
        v.instances = read_pgm(dir / f.instances);
        check(v.instances->width, v.instances->height, "mask");
      }
      if (!f.planes.empty()) {
        v.planes = read_pgm(dir / f.planes);
        check(v.planes->width, v.planes->height, "plane mask");
      }
      b.views.push_back(std::move(v));
    }
  }
  for (const auto& [name, rel] : m.files) {
    const fs::path p = dir / rel;
    if (name == "cloud") {
      b.cloud = load_cloud(p);
    } else if (name == "partition") {
      b.partition = load_cloud(p);
    } else if (name == "planes") {
      b.planes = read_planes(p);
    } else if (name.size() >= 4 && name.compare(name.size() - 4, 4, "mesh") == 0) {
      b.meshes.emplace(name, load_mesh(p));
    }
  }
  for (const std::optional<PointCloud>* c : {&b.cloud, &b.partition}) {
    if (!*c) continue;
    for (const auto& [name, col] : (*c)->labels) {
      if (col.size() != (*c)->points.size()) throw Error(ErrorCode::DimensionMismatch, "label column length");
    }
  }
  if (b.partition) {
    if (!b.partition->labels.count("cluster")) throw Error(ErrorCode::Schema, "partition lacks a cluster column");
    if (b.cloud && b.cloud->points.size() != b.partition->points.size()) {
      throw Error(ErrorCode::DimensionMismatch, "partition length differs from cloud length");
    }
  }
  return b;
}

}  // namespace planekit
