#include "rescade/serialize.hpp"

#include <fstream>
#include <sstream>

#include "rescade/errors.hpp"
#include "rescade/report.hpp"

namespace rescade {

namespace {

// Token-stream helpers; the formats are whitespace-separated throughout, the
// line structure in the writers is only for human eyes.

void expect(std::istream& in, const std::string& keyword) {
  std::string tok;
  if (!(in >> tok) || tok != keyword)
    throw IoError("model file: expected '" + keyword + "', found '" + tok +
                  "'");
}

template <class T>
T read_value(std::istream& in, const std::string& what) {
  T v;
  if (!(in >> v)) throw IoError("model file: failed reading " + what);
  return v;
}

void read_doubles(std::istream& in, std::vector<double>& out,
                  std::size_t count, const std::string& what) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    if (!(in >> out[i]))
      throw IoError("model file: failed reading " + what + " entry " +
                    std::to_string(i));
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << format_double(values[i]);
  }
  out << '\n';
}

template <class SaveFn>
void save_to_path(const std::string& path, SaveFn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

template <class LoadFn>
auto load_from_path(const std::string& path, LoadFn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return fn(in);
}

void save_layer_map(const LayerMap& map, std::ostream& out) {
  out << "map " << map.in_dim << ' ' << map.out_dim << ' '
      << map.activation.name() << '\n';
  out << "matrix ";
  write_doubles(out, map.matrix);
  out << "bias ";
  write_doubles(out, map.bias);
  out << "certificate " << format_double(map.certificate.min_singular_value)
      << ' ' << format_double(map.certificate.reconstruction_error) << '\n';
}

LayerMap load_layer_map(std::istream& in) {
  LayerMap map;
  expect(in, "map");
  map.in_dim = read_value<int>(in, "map in_dim");
  map.out_dim = read_value<int>(in, "map out_dim");
  map.activation = Activation::parse(read_value<std::string>(in, "activation"));
  if (map.in_dim < 1 || map.out_dim < map.in_dim)
    throw IoError("model file: bad map shape");
  expect(in, "matrix");
  read_doubles(in, map.matrix,
               static_cast<std::size_t>(map.out_dim) * map.in_dim, "matrix");
  expect(in, "bias");
  read_doubles(in, map.bias, map.out_dim, "bias");
  expect(in, "certificate");
  map.certificate.min_singular_value = read_value<double>(in, "certificate");
  map.certificate.reconstruction_error = read_value<double>(in, "certificate");
  return map;
}

}  // namespace

void save_shallow(const ShallowNet& net, std::ostream& out) {
  out << "shallow 1\n";
  out << "activation " << net.activation.name() << '\n';
  out << "inputs " << net.input_dim << '\n';
  out << "units " << net.units << '\n';
  out << "outer ";
  write_doubles(out, net.outer);
  out << "bias ";
  write_doubles(out, net.inner_bias);
  out << "weights ";
  write_doubles(out, net.inner_weights);
}

void save_shallow(const ShallowNet& net, const std::string& path) {
  save_to_path(path, [&](std::ostream& out) { save_shallow(net, out); });
}

ShallowNet load_shallow(std::istream& in) {
  expect(in, "shallow");
  const int version = read_value<int>(in, "version");
  if (version != 1)
    throw IoError("model file: unsupported shallow version " +
                  std::to_string(version));
  expect(in, "activation");
  const Activation act =
      Activation::parse(read_value<std::string>(in, "activation"));
  expect(in, "inputs");
  const int inputs = read_value<int>(in, "inputs");
  expect(in, "units");
  const int units = read_value<int>(in, "units");
  if (inputs < 1 || units < 1) throw IoError("model file: bad network shape");
  ShallowNet net = ShallowNet::zeros(inputs, units, act);
  expect(in, "outer");
  read_doubles(in, net.outer, units, "outer");
  expect(in, "bias");
  read_doubles(in, net.inner_bias, units, "bias");
  expect(in, "weights");
  read_doubles(in, net.inner_weights,
               static_cast<std::size_t>(units) * inputs, "weights");
  return net;
}

ShallowNet load_shallow(const std::string& path) {
  return load_from_path(path,
                        [](std::istream& in) { return load_shallow(in); });
}

void save_cascade(const CascadeModel& model, const std::string& path) {
  save_to_path(path, [&](std::ostream& out) {
    out << "cascade 1\n";
    out << "inputs " << model.input_dim << '\n';
    out << "mode " << feature_mode_name(model.mode) << '\n';
    out << "depth " << model.depth() << '\n';
    out << "initial_error " << format_double(model.initial_error) << '\n';
    out << "scales ";
    write_doubles(out, model.scales);
    for (const ShallowNet& net : model.layers) save_shallow(net, out);
  });
}

CascadeModel load_cascade(const std::string& path) {
  return load_from_path(path, [](std::istream& in) {
    expect(in, "cascade");
    const int version = read_value<int>(in, "version");
    if (version != 1)
      throw IoError("model file: unsupported cascade version " +
                    std::to_string(version));
    CascadeModel model;
    expect(in, "inputs");
    model.input_dim = read_value<int>(in, "inputs");
    expect(in, "mode");
    model.mode = parse_feature_mode(read_value<std::string>(in, "mode"));
    expect(in, "depth");
    const int depth = read_value<int>(in, "depth");
    if (model.input_dim < 1 || depth < 1)
      throw IoError("model file: bad cascade shape");
    expect(in, "initial_error");
    model.initial_error = read_value<double>(in, "initial_error");
    expect(in, "scales");
    read_doubles(in, model.scales, depth > 0 ? depth - 1 : 0, "scales");
    for (int j = 0; j < depth; ++j) model.layers.push_back(load_shallow(in));
    return model;
  });
}

void save_layernet(const LayerNetModel& model, const std::string& path) {
  save_to_path(path, [&](std::ostream& out) {
    out << "layernet 1\n";
    out << "inputs " << model.input_dim << '\n';
    out << "width " << model.width << '\n';
    out << "depth " << model.depth() << '\n';
    out << "initial_error " << format_double(model.initial_error) << '\n';
    out << "scales ";
    write_doubles(out, model.scales);
    if (model.reduction)
      out << "reduction 1 " << model.reduction->collapsed_dims << ' '
          << model.reduction->level << '\n';
    else
      out << "reduction 0\n";
    for (const LayerMap& map : model.chain) save_layer_map(map, out);
    for (const ShallowNet& net : model.stages) save_shallow(net, out);
  });
}

LayerNetModel load_layernet(const std::string& path) {
  return load_from_path(path, [](std::istream& in) {
    expect(in, "layernet");
    const int version = read_value<int>(in, "version");
    if (version != 1)
      throw IoError("model file: unsupported layernet version " +
                    std::to_string(version));
    LayerNetModel model;
    expect(in, "inputs");
    model.input_dim = read_value<int>(in, "inputs");
    expect(in, "width");
    model.width = read_value<int>(in, "width");
    expect(in, "depth");
    const int depth = read_value<int>(in, "depth");
    if (model.input_dim < 1 || model.width < 1 || depth < 1)
      throw IoError("model file: bad layernet shape");
    expect(in, "initial_error");
    model.initial_error = read_value<double>(in, "initial_error");
    expect(in, "scales");
    read_doubles(in, model.scales, depth > 0 ? depth - 1 : 0, "scales");
    expect(in, "reduction");
    const int has_reduction = read_value<int>(in, "reduction flag");
    if (has_reduction == 1) {
      HilbertReduction r;
      r.collapsed_dims = read_value<int>(in, "collapsed dims");
      r.level = read_value<int>(in, "level");
      model.reduction = r;
    } else if (has_reduction != 0) {
      throw IoError("model file: bad reduction flag");
    }
    for (int j = 0; j < depth; ++j) model.chain.push_back(load_layer_map(in));
    for (int j = 0; j < depth; ++j) model.stages.push_back(load_shallow(in));
    return model;
  });
}

}  // namespace rescade
