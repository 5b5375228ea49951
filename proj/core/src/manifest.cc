// Copyright 2026 The Evalscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evalscope/manifest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "evalscope/error.h"

namespace evalscope {

using yaml::Node;

std::string_view step_kind(const ProcessingStep& step) {
  struct Visitor {
    std::string_view operator()(const DecodeStep&) const { return "decode"; }
    std::string_view operator()(const CropStep&) const { return "crop"; }
    std::string_view operator()(const ResizeStep&) const { return "resize"; }
    std::string_view operator()(const MeanStep&) const { return "mean"; }
    std::string_view operator()(const RescaleStep&) const { return "rescale"; }
    std::string_view operator()(const CastStep&) const { return "cast"; }
  };
  return std::visit(Visitor{}, step);
}

int input_channels(const InputSpec& in) {
  for (const auto& step : in.processing) {
    if (const auto* r = std::get_if<ResizeStep>(&step)) return r->dimensions[0];
  }
  return 3;
}

namespace {

// ---------------------------------------------------------------------------
// Reading

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index_path(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

class Reader {
 public:
  explicit Reader(std::vector<ExtraField>* extras) : extras_(extras) {}

  // Records every key of `map` not listed in `known` as an extra field.
  void collect_unknown(const Node& map, const std::string& path,
                       std::initializer_list<std::string_view> known) {
    for (size_t i = 0; i < map.size(); ++i) {
      const auto& key = map.keys()[i];
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        extras_->push_back(ExtraField{join(path, key), map.values()[i]});
      }
    }
  }

 private:
  std::vector<ExtraField>* extras_;
};

const Node& expect_mapping(const Node& n, const std::string& path) {
  if (!n.is_mapping()) throw SchemaError(path, "expected a mapping");
  return n;
}

const Node& require(const Node& map, std::string_view key, const std::string& path) {
  const Node* n = map.find(key);
  if (n == nullptr || n->is_null()) throw SchemaError(join(path, key), "required field is missing");
  return *n;
}

std::string scalar_of(const Node& n, const std::string& path) {
  if (!n.is_scalar()) throw SchemaError(path, "expected a scalar");
  return n.value();
}

std::optional<std::string> optional_scalar(const Node& map, std::string_view key,
                                           const std::string& path) {
  const Node* n = map.find(key);
  if (n == nullptr || n->is_null()) return std::nullopt;
  return scalar_of(*n, join(path, key));
}

double number_of(const Node& n, const std::string& path) {
  const std::string s = scalar_of(n, path);
  double value = 0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw SchemaError(path, "expected a number, got '" + s + "'");
  }
  return value;
}

int int_of(const Node& n, const std::string& path) {
  const double d = number_of(n, path);
  if (d != std::floor(d) || std::fabs(d) > 1e9) {
    throw SchemaError(path, "expected an integer");
  }
  return static_cast<int>(d);
}

bool bool_of(const Node& n, const std::string& path) {
  const std::string s = scalar_of(n, path);
  if (s == "true" || s == "True" || s == "yes") return true;
  if (s == "false" || s == "False" || s == "no") return false;
  throw SchemaError(path, "expected true or false, got '" + s + "'");
}

template <typename T>
T enum_of(const Node& n, const std::string& path, std::optional<T> (*parse)(std::string_view),
          std::string_view what) {
  const std::string s = scalar_of(n, path);
  auto v = parse(s);
  if (!v) {
    throw SchemaError(path, "unsupported " + std::string(what) + " '" + s + "'",
                      ErrorCode::kUnsupported);
  }
  return *v;
}

SemVer version_of(const Node& n, const std::string& path,
                  std::vector<std::pair<std::string, std::string>>* notes) {
  const std::string s = scalar_of(n, path);
  bool padded = false;
  try {
    SemVer v = SemVer::parse_lenient(s, &padded);
    if (padded && notes) {
      notes->emplace_back(path, "'" + s + "' is not a full semantic version; read as " +
                                    v.to_string());
    }
    return v;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

ProcessingStep parse_step(const std::string& kind, const Node& params,
                          const std::string& path, Reader& reader) {
  if (kind == "decode") {
    DecodeStep s;
    if (params.is_null()) return s;
    expect_mapping(params, path);
    if (const Node* n = params.find("element_type")) {
      s.element_type = enum_of(*n, join(path, "element_type"), parse_element_type, "element type");
    }
    if (const Node* n = params.find("data_layout")) {
      s.data_layout = enum_of(*n, join(path, "data_layout"), parse_data_layout, "data layout");
    }
    if (const Node* n = params.find("color_layout")) {
      s.color_layout = enum_of(*n, join(path, "color_layout"), parse_color_layout, "color layout");
    }
    if (const Node* n = params.find("dct_method")) {
      s.dct_method = enum_of(*n, join(path, "dct_method"), parse_dct_method, "dct method");
    }
    reader.collect_unknown(params, path, {"element_type", "data_layout", "color_layout", "dct_method"});
    return s;
  }
  if (kind == "crop") {
    CropStep s;
    expect_mapping(params, path);
    if (auto m = optional_scalar(params, "method", path)) {
      if (*m != "center") {
        throw SchemaError(join(path, "method"), "unsupported crop method '" + *m + "'",
                          ErrorCode::kUnsupported);
      }
      s.method = *m;
    }
    s.percentage = number_of(require(params, "percentage", path), join(path, "percentage"));
    reader.collect_unknown(params, path, {"method", "percentage"});
    return s;
  }
  if (kind == "resize") {
    ResizeStep s;
    expect_mapping(params, path);
    const std::string dpath = join(path, "dimensions");
    const Node& dims = require(params, "dimensions", path);
    if (!dims.is_sequence() || dims.items().size() != 3) {
      throw SchemaError(dpath, "expected [C, H, W]");
    }
    for (size_t i = 0; i < 3; ++i) {
      s.dimensions[i] = int_of(dims.items()[i], index_path(dpath, i));
    }
    if (auto m = optional_scalar(params, "method", path)) {
      if (*m != "bilinear") {
        throw SchemaError(join(path, "method"), "unsupported resize method '" + *m + "'",
                          ErrorCode::kUnsupported);
      }
      s.method = *m;
    }
    if (const Node* n = params.find("keep_aspect_ratio"); n && !n->is_null()) {
      s.keep_aspect_ratio = bool_of(*n, join(path, "keep_aspect_ratio"));
    }
    reader.collect_unknown(params, path, {"dimensions", "method", "keep_aspect_ratio"});
    return s;
  }
  if (kind == "mean") {
    MeanStep s;
    if (!params.is_sequence()) throw SchemaError(path, "expected a list of per-channel means");
    for (size_t i = 0; i < params.items().size(); ++i) {
      s.values.push_back(number_of(params.items()[i], index_path(path, i)));
    }
    return s;
  }
  if (kind == "rescale") {
    return RescaleStep{number_of(params, path)};
  }
  if (kind == "cast") {
    CastStep s;
    expect_mapping(params, path);
    if (const Node* n = params.find("element_type")) {
      s.element_type = enum_of(*n, join(path, "element_type"), parse_element_type, "element type");
    }
    if (const Node* n = params.find("order_policy")) {
      s.order_policy = enum_of(*n, join(path, "order_policy"), parse_order_policy, "order policy");
    }
    reader.collect_unknown(params, path, {"element_type", "order_policy"});
    return s;
  }
  throw SchemaError(path, "unsupported processing step '" + kind + "'", ErrorCode::kUnsupported);
}

std::vector<ProcessingStep> parse_processing(const Node& node, const std::string& path,
                                             Reader& reader) {
  std::vector<ProcessingStep> steps;
  if (node.is_null()) return steps;
  if (node.is_mapping()) {
    for (size_t i = 0; i < node.size(); ++i) {
      const auto& kind = node.keys()[i];
      steps.push_back(parse_step(kind, node.values()[i], join(path, kind), reader));
    }
    return steps;
  }
  if (node.is_sequence()) {
    // List form allows a step kind to appear more than once.
    for (size_t i = 0; i < node.items().size(); ++i) {
      const Node& item = node.items()[i];
      const std::string ipath = index_path(path, i);
      if (!item.is_mapping() || item.size() != 1) {
        throw SchemaError(ipath, "expected a single-key step mapping");
      }
      steps.push_back(parse_step(item.keys()[0], item.values()[0],
                                 join(ipath, item.keys()[0]), reader));
    }
    return steps;
  }
  throw SchemaError(path, "expected an ordered mapping of processing steps");
}

InputSpec parse_input(const Node& node, const std::string& path, Reader& reader) {
  expect_mapping(node, path);
  InputSpec in;
  if (auto t = optional_scalar(node, "type", path)) {
    if (*t != "image") {
      throw SchemaError(join(path, "type"), "unsupported input modality '" + *t + "'",
                        ErrorCode::kUnsupported);
    }
    in.type = *t;
  }
  if (auto l = optional_scalar(node, "layer_name", path)) in.layer_name = *l;
  if (const Node* n = node.find("element_type"); n && !n->is_null()) {
    in.element_type = enum_of(*n, join(path, "element_type"), parse_element_type, "element type");
  }
  const Node* layout = node.find("layout");
  if (layout == nullptr) layout = node.find("data_layout");
  if (layout && !layout->is_null()) {
    in.layout = enum_of(*layout, join(path, "layout"), parse_data_layout, "data layout");
  }
  if (const Node* n = node.find("color_layout"); n && !n->is_null()) {
    in.color_layout = enum_of(*n, join(path, "color_layout"), parse_color_layout, "color layout");
  }
  if (const Node* n = node.find("processing")) {
    in.processing = parse_processing(*n, join(path, "processing"), reader);
  }
  reader.collect_unknown(node, path, {"type", "layer_name", "element_type", "layout",
                                      "data_layout", "color_layout", "processing"});
  return in;
}

OutputSpec parse_output(const Node& node, const std::string& path, Reader& reader) {
  expect_mapping(node, path);
  OutputSpec out;
  out.type = enum_of(require(node, "type", path), join(path, "type"), parse_output_type,
                     "output type");
  if (auto l = optional_scalar(node, "layer_name", path)) out.layer_name = *l;
  if (const Node* n = node.find("element_type"); n && !n->is_null()) {
    out.element_type = enum_of(*n, join(path, "element_type"), parse_element_type, "element type");
  }
  out.features_url = optional_scalar(node, "features_url", path);
  if (const Node* proc = node.find("processing"); proc && !proc->is_null()) {
    const std::string ppath = join(path, "processing");
    expect_mapping(*proc, ppath);
    if (auto url = optional_scalar(*proc, "features_url", ppath)) {
      if (out.features_url && *out.features_url != *url) {
        throw SchemaError(join(ppath, "features_url"), "conflicts with features_url on the output");
      }
      out.features_url = url;
    }
    reader.collect_unknown(*proc, ppath, {"features_url"});
  }
  reader.collect_unknown(node, path,
                         {"type", "layer_name", "element_type", "features_url", "processing"});
  return out;
}

// ---------------------------------------------------------------------------
// Writing

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

Node str(std::string_view s) { return Node::scalar(std::string(s)); }

Node step_params(const ProcessingStep& step) {
  struct Visitor {
    Node operator()(const DecodeStep& s) const {
      Node m = Node::mapping();
      m.add("element_type", str(to_string(s.element_type)));
      m.add("data_layout", str(to_string(s.data_layout)));
      m.add("color_layout", str(to_string(s.color_layout)));
      m.add("dct_method", str(to_string(s.dct_method)));
      return m;
    }
    Node operator()(const CropStep& s) const {
      Node m = Node::mapping();
      m.add("method", str(s.method));
      m.add("percentage", str(format_number(s.percentage)));
      return m;
    }
    Node operator()(const ResizeStep& s) const {
      Node m = Node::mapping();
      Node dims = Node::sequence();
      for (int d : s.dimensions) dims.push_back(str(std::to_string(d)));
      m.add("dimensions", std::move(dims));
      m.add("method", str(s.method));
      m.add("keep_aspect_ratio", str(s.keep_aspect_ratio ? "true" : "false"));
      return m;
    }
    Node operator()(const MeanStep& s) const {
      Node seq = Node::sequence();
      for (double v : s.values) seq.push_back(str(format_number(v)));
      return seq;
    }
    Node operator()(const RescaleStep& s) const { return str(format_number(s.value)); }
    Node operator()(const CastStep& s) const {
      Node m = Node::mapping();
      m.add("element_type", str(to_string(s.element_type)));
      m.add("order_policy", str(to_string(s.order_policy)));
      return m;
    }
  };
  return std::visit(Visitor{}, step);
}

Node processing_node(const std::vector<ProcessingStep>& steps) {
  std::set<std::string_view> kinds;
  bool repeated = false;
  for (const auto& s : steps) repeated |= !kinds.insert(step_kind(s)).second;
  if (!repeated) {
    Node m = Node::mapping();
    for (const auto& s : steps) m.add(std::string(step_kind(s)), step_params(s));
    return m;
  }
  Node seq = Node::sequence();
  for (const auto& s : steps) {
    Node item = Node::mapping();
    item.add(std::string(step_kind(s)), step_params(s));
    seq.push_back(std::move(item));
  }
  return seq;
}

// Splits "inputs[0].processing.foo" into navigable segments.
struct Segment {
  std::string key;
  std::optional<size_t> index;
};

std::vector<Segment> split_path(const std::string& path) {
  std::vector<Segment> out;
  size_t start = 0;
  while (start <= path.size()) {
    size_t dot = path.find('.', start);
    std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    Segment seg;
    if (auto br = part.find('['); br != std::string::npos && part.back() == ']') {
      seg.key = part.substr(0, br);
      seg.index = std::stoul(part.substr(br + 1, part.size() - br - 2));
    } else {
      seg.key = part;
    }
    out.push_back(std::move(seg));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return out;
}

void insert_extra(Node& root, const ExtraField& extra) {
  auto segs = split_path(extra.path);
  Node* cur = &root;
  for (size_t i = 0; i + 1 < segs.size(); ++i) {
    Node* next = cur->find(segs[i].key);
    if (next == nullptr) {
      cur->add(segs[i].key, Node::mapping());
      next = cur->find(segs[i].key);
    } else if (next->is_null()) {
      *next = Node::mapping();
    }
    if (segs[i].index) {
      if (!next->is_sequence() || *segs[i].index >= next->items().size()) return;
      next = &next->items()[*segs[i].index];
    }
    if (!next->is_mapping()) return;
    cur = next;
  }
  if (cur->find(segs.back().key) == nullptr) cur->add(segs.back().key, extra.value);
}

}  // namespace

ModelManifest parse_manifest(std::string_view text) {
  const Node root = yaml::parse(text);
  if (!root.is_mapping()) throw SchemaError("", "manifest must be a mapping");

  ModelManifest m;
  Reader reader(&m.extras);

  m.name = scalar_of(require(root, "name", ""), "name");
  m.version = version_of(require(root, "version", ""), "version", &m.parse_notes);
  m.task = enum_of(require(root, "task", ""), "task", parse_task, "task");
  if (auto l = optional_scalar(root, "license", "")) {
    m.license = *l;
  } else if (auto l2 = optional_scalar(root, "licence", "")) {
    m.license = *l2;
  }
  if (auto d = optional_scalar(root, "description", "")) m.description = *d;
  if (const Node* refs = root.find("references"); refs && !refs->is_null()) {
    if (!refs->is_sequence()) throw SchemaError("references", "expected a list");
    for (size_t i = 0; i < refs->items().size(); ++i) {
      m.references.push_back(scalar_of(refs->items()[i], index_path("references", i)));
    }
  }

  const Node& fw = expect_mapping(require(root, "framework", ""), "framework");
  m.framework.name = scalar_of(require(fw, "name", "framework"), "framework.name");
  const std::string constraint =
      scalar_of(require(fw, "version", "framework"), "framework.version");
  try {
    m.framework.version_constraint = VersionConstraint::parse(constraint);
  } catch (const Error& e) {
    throw SchemaError("framework.version", e.what());
  }
  reader.collect_unknown(fw, "framework", {"name", "version"});

  const char* container_key = root.find("container") ? "container" : "containers";
  if (root.find("container") && root.find("containers")) {
    throw SchemaError("containers", "both 'container' and 'containers' are present");
  }
  if (const Node* cm = root.find(container_key); cm && !cm->is_null()) {
    expect_mapping(*cm, container_key);
    for (size_t i = 0; i < cm->size(); ++i) {
      const std::string apath = join(container_key, cm->keys()[i]);
      const Node& devices = expect_mapping(cm->values()[i], apath);
      auto& slot = m.containers[cm->keys()[i]];
      for (size_t j = 0; j < devices.size(); ++j) {
        const Node& ref = devices.values()[j];
        slot[devices.keys()[j]] =
            ref.is_null() ? std::string() : scalar_of(ref, join(apath, devices.keys()[j]));
      }
    }
  }

  if (const Node* env = root.find("envvars"); env && !env->is_null()) {
    if (env->is_mapping()) {
      for (size_t i = 0; i < env->size(); ++i) {
        m.envvars.emplace_back(env->keys()[i],
                               scalar_of(env->values()[i], join("envvars", env->keys()[i])));
      }
    } else if (env->is_sequence()) {
      for (size_t i = 0; i < env->items().size(); ++i) {
        const Node& item = env->items()[i];
        const std::string ipath = index_path("envvars", i);
        if (!item.is_mapping()) throw SchemaError(ipath, "expected KEY: value");
        for (size_t j = 0; j < item.size(); ++j) {
          m.envvars.emplace_back(item.keys()[j],
                                 scalar_of(item.values()[j], join(ipath, item.keys()[j])));
        }
      }
    } else {
      throw SchemaError("envvars", "expected a list of KEY: value entries");
    }
  }

  const Node* inputs = root.find("inputs");
  if (inputs == nullptr || inputs->is_null()) throw SchemaError("inputs", "required field is missing");
  if (!inputs->is_sequence()) throw SchemaError("inputs", "expected a list");
  if (inputs->items().empty()) throw SchemaError("inputs", "at least one input is required");
  for (size_t i = 0; i < inputs->items().size(); ++i) {
    m.inputs.push_back(parse_input(inputs->items()[i], index_path("inputs", i), reader));
  }

  const Node* outputs = root.find("outputs");
  if (outputs == nullptr || outputs->is_null()) throw SchemaError("outputs", "required field is missing");
  if (!outputs->is_sequence()) throw SchemaError("outputs", "expected a list");
  if (outputs->items().empty()) throw SchemaError("outputs", "at least one output is required");
  for (size_t i = 0; i < outputs->items().size(); ++i) {
    m.outputs.push_back(parse_output(outputs->items()[i], index_path("outputs", i), reader));
  }

  const Node& src = expect_mapping(require(root, "source", ""), "source");
  m.source.base_url = optional_scalar(src, "base_url", "source");
  m.source.graph_path = scalar_of(require(src, "graph_path", "source"), "source.graph_path");
  m.source.weights_path = optional_scalar(src, "weights_path", "source");
  m.source.graph_checksum = optional_scalar(src, "graph_checksum", "source");
  m.source.weights_checksum = optional_scalar(src, "weights_checksum", "source");
  reader.collect_unknown(src, "source",
                         {"base_url", "graph_path", "weights_path", "graph_checksum", "weights_checksum"});

  if (const Node* ds = root.find("training_dataset"); ds && !ds->is_null()) {
    expect_mapping(*ds, "training_dataset");
    DatasetRef ref;
    ref.name = scalar_of(require(*ds, "name", "training_dataset"), "training_dataset.name");
    ref.version = version_of(require(*ds, "version", "training_dataset"),
                             "training_dataset.version", &m.parse_notes);
    reader.collect_unknown(*ds, "training_dataset", {"name", "version"});
    m.training_dataset = std::move(ref);
  }

  if (const Node* attrs = root.find("attributes"); attrs && !attrs->is_null()) {
    m.attributes = expect_mapping(*attrs, "attributes");
  }

  reader.collect_unknown(root, "",
                         {"name", "version", "task", "license", "licence", "description",
                          "references", "framework", "container", "containers", "envvars",
                          "inputs", "outputs", "source", "training_dataset", "attributes"});
  return m;
}

std::string serialize_manifest(const ModelManifest& m) {
  Node root = Node::mapping();
  root.add("name", str(m.name));
  root.add("version", str(m.version.to_string()));
  root.add("task", str(to_string(m.task)));
  if (!m.license.empty()) root.add("license", str(m.license));
  if (!m.description.empty()) root.add("description", str(m.description));
  if (!m.references.empty()) {
    Node refs = Node::sequence();
    for (const auto& r : m.references) refs.push_back(str(r));
    root.add("references", std::move(refs));
  }

  Node fw = Node::mapping();
  fw.add("name", str(m.framework.name));
  fw.add("version", str(m.framework.version_constraint.to_string()));
  root.add("framework", std::move(fw));

  if (!m.containers.empty()) {
    Node cm = Node::mapping();
    for (const auto& [arch, devices] : m.containers) {
      Node d = Node::mapping();
      for (const auto& [device, ref] : devices) d.add(device, str(ref));
      cm.add(arch, std::move(d));
    }
    root.add("container", std::move(cm));
  }

  if (!m.envvars.empty()) {
    Node env = Node::sequence();
    for (const auto& [k, v] : m.envvars) {
      Node item = Node::mapping();
      item.add(k, str(v));
      env.push_back(std::move(item));
    }
    root.add("envvars", std::move(env));
  }

  Node inputs = Node::sequence();
  for (const auto& in : m.inputs) {
    Node n = Node::mapping();
    n.add("type", str(in.type));
    if (!in.layer_name.empty()) n.add("layer_name", str(in.layer_name));
    n.add("element_type", str(to_string(in.element_type)));
    if (in.layout) n.add("layout", str(to_string(*in.layout)));
    if (in.color_layout) n.add("color_layout", str(to_string(*in.color_layout)));
    if (!in.processing.empty()) n.add("processing", processing_node(in.processing));
    inputs.push_back(std::move(n));
  }
  root.add("inputs", std::move(inputs));

  Node outputs = Node::sequence();
  for (const auto& out : m.outputs) {
    Node n = Node::mapping();
    n.add("type", str(to_string(out.type)));
    if (!out.layer_name.empty()) n.add("layer_name", str(out.layer_name));
    n.add("element_type", str(to_string(out.element_type)));
    if (out.features_url) {
      Node proc = Node::mapping();
      proc.add("features_url", str(*out.features_url));
      n.add("processing", std::move(proc));
    }
    outputs.push_back(std::move(n));
  }
  root.add("outputs", std::move(outputs));

  Node src = Node::mapping();
  if (m.source.base_url) src.add("base_url", str(*m.source.base_url));
  src.add("graph_path", str(m.source.graph_path));
  if (m.source.weights_path) src.add("weights_path", str(*m.source.weights_path));
  if (m.source.graph_checksum) src.add("graph_checksum", str(*m.source.graph_checksum));
  if (m.source.weights_checksum) src.add("weights_checksum", str(*m.source.weights_checksum));
  root.add("source", std::move(src));

  if (m.training_dataset) {
    Node ds = Node::mapping();
    ds.add("name", str(m.training_dataset->name));
    ds.add("version", str(m.training_dataset->version.to_string()));
    root.add("training_dataset", std::move(ds));
  }
  if (m.attributes.is_mapping()) root.add("attributes", m.attributes);

  for (const auto& extra : m.extras) insert_extra(root, extra);
  return yaml::emit(root);
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has_errors() const { return error_count() > 0; }

size_t ValidationReport::error_count() const {
  return static_cast<size_t>(std::count_if(violations.begin(), violations.end(), [](const auto& v) {
    return v.severity == Severity::kError;
  }));
}

size_t ValidationReport::warning_count() const { return violations.size() - error_count(); }

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : violations) {
    list.push_back({{"path", v.path},
                    {"severity", v.severity == Severity::kError ? "error" : "warning"},
                    {"message", v.message}});
  }
  return {{"valid", !has_errors()},
          {"errors", error_count()},
          {"warnings", warning_count()},
          {"violations", std::move(list)}};
}

ValidationReport validate_manifest(const ModelManifest& m) {
  ValidationReport report;
  auto error = [&](std::string path, std::string msg) {
    report.violations.push_back({std::move(path), Severity::kError, std::move(msg)});
  };
  auto warn = [&](std::string path, std::string msg) {
    report.violations.push_back({std::move(path), Severity::kWarning, std::move(msg)});
  };

  if (m.name.empty()) error("name", "must not be empty");
  if (m.framework.name.empty()) error("framework.name", "must not be empty");
  if (m.framework.version_constraint.empty()) error("framework.version", "constraint has no clauses");
  for (const auto& [arch, devices] : m.containers) {
    for (const auto& [device, ref] : devices) {
      if (ref.empty()) error("container." + arch + "." + device, "container reference is empty");
    }
  }
  for (size_t i = 0; i < m.envvars.size(); ++i) {
    if (m.envvars[i].first.empty()) error(index_path("envvars", i), "empty variable name");
  }

  if (m.inputs.empty()) error("inputs", "at least one input is required");
  for (size_t i = 0; i < m.inputs.size(); ++i) {
    const InputSpec& in = m.inputs[i];
    const std::string ipath = index_path("inputs", i);
    if (in.layer_name.empty()) warn(ipath + ".layer_name", "input has no layer name");
    const int channels = input_channels(in);
    for (size_t s = 0; s < in.processing.size(); ++s) {
      const ProcessingStep& step = in.processing[s];
      const std::string spath = ipath + ".processing." + std::string(step_kind(step));
      if (std::holds_alternative<DecodeStep>(step) && s != 0) {
        error(spath, "decode must be the first processing step");
      }
      if (const auto* c = std::get_if<CropStep>(&step)) {
        if (!(c->percentage > 0.0 && c->percentage <= 100.0)) {
          error(spath + ".percentage", "crop percentage must be in (0, 100]");
        }
      } else if (const auto* r = std::get_if<ResizeStep>(&step)) {
        for (int d : r->dimensions) {
          if (d < 1) {
            error(spath + ".dimensions", "all resize dimensions must be >= 1");
            break;
          }
        }
        if (r->dimensions[0] != 3) error(spath + ".dimensions", "only 3-channel images are supported");
      } else if (const auto* mean = std::get_if<MeanStep>(&step)) {
        if (static_cast<int>(mean->values.size()) != channels) {
          error(spath, "expected " + std::to_string(channels) + " per-channel means, got " +
                           std::to_string(mean->values.size()));
        }
      } else if (const auto* rs = std::get_if<RescaleStep>(&step)) {
        if (!(rs->value > 0.0)) error(spath, "rescale must be > 0");
      } else if (const auto* cast = std::get_if<CastStep>(&step)) {
        if (cast->element_type == ElementType::kInt8) {
          error(spath + ".element_type", "cast target must be uint8 or float32");
        }
      }
    }
  }

  if (m.outputs.empty()) error("outputs", "at least one output is required");
  auto count_type = [&](OutputType t) {
    return std::count_if(m.outputs.begin(), m.outputs.end(), [&](const auto& o) { return o.type == t; });
  };
  switch (m.task) {
    case Task::kClassification:
      if (count_type(OutputType::kProbability) != 1) {
        error("outputs", "classification requires exactly one probability output");
      }
      break;
    case Task::kInstanceSegmentation:
      if (count_type(OutputType::kMask) < 1) error("outputs", "instance segmentation requires a mask output");
      [[fallthrough]];
    case Task::kObjectDetection:
      for (auto t : {OutputType::kBox, OutputType::kProbability, OutputType::kClass}) {
        if (count_type(t) < 1) {
          error("outputs", std::string(to_string(m.task)) + " requires a " +
                               std::string(to_string(t)) + " output");
        }
      }
      break;
  }
  for (size_t i = 0; i < m.outputs.size(); ++i) {
    const OutputSpec& out = m.outputs[i];
    const std::string opath = index_path("outputs", i);
    if (out.layer_name.empty()) warn(opath + ".layer_name", "output has no layer name");
    if (m.task == Task::kClassification && out.type == OutputType::kProbability &&
        !out.features_url) {
      warn(opath + ".features_url", "no label list; labeled accuracy metrics are unavailable");
    }
  }

  if (m.source.graph_path.empty()) error("source.graph_path", "must not be empty");
  auto check_hex = [&](const std::optional<std::string>& sum, const char* path) {
    if (!sum) return;
    std::string_view hex = *sum;
    if (hex.starts_with("sha256:")) hex.remove_prefix(7);
    const bool ok = hex.size() == 64 && std::all_of(hex.begin(), hex.end(), [](char c) {
      return std::isxdigit(static_cast<unsigned char>(c));
    });
    if (!ok) error(path, "checksum must be a 64-digit hex SHA-256");
  };
  check_hex(m.source.graph_checksum, "source.graph_checksum");
  check_hex(m.source.weights_checksum, "source.weights_checksum");

  if (m.training_dataset && m.training_dataset->name.empty()) {
    error("training_dataset.name", "must not be empty");
  }
  for (const auto& [path, note] : m.parse_notes) warn(path, note);
  for (const auto& extra : m.extras) warn(extra.path, "unknown key preserved but not interpreted");
  return report;
}

std::string resolve_container(const ModelManifest& m, std::string_view arch,
                              std::string_view device) {
  if (auto a = m.containers.find(std::string(arch)); a != m.containers.end()) {
    if (auto d = a->second.find(std::string(device)); d != a->second.end() && !d->second.empty()) {
      return d->second;
    }
  }
  std::string available;
  for (const auto& [a, devices] : m.containers) {
    for (const auto& [d, ref] : devices) {
      if (!available.empty()) available += ", ";
      available += a + "/" + d;
    }
  }
  throw Error(ErrorCode::kNotFound, "no container for platform " + std::string(arch) + "/" +
                                        std::string(device) + " (available: " +
                                        (available.empty() ? "none" : available) + ")");
}

}  // namespace evalscope
