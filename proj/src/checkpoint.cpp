#include "ddnn/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include "ddnn/error.hpp"

namespace ddnn {

namespace {

nlohmann::json ranges_to_json(const std::vector<ColumnRange>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs)
    arr.push_back({{"lo", r.lo}, {"hi", r.hi}, {"degenerate", r.degenerate}});
  return arr;
}

std::vector<ColumnRange> ranges_from_json(const nlohmann::json& arr) {
  std::vector<ColumnRange> out;
  for (const auto& j : arr)
    out.push_back({j.at("lo").get<double>(), j.at("hi").get<double>(),
                   j.at("degenerate").get<bool>()});
  return out;
}

}  // namespace

nlohmann::json network_to_json(const MlpNetwork& net) {
  nlohmann::json j;
  j["layer_widths"] = net.layer_widths;
  j["activation"] = net.activation == Activation::kSwish ? "swish" : "identity";
  j["params"] = net.params;
  j["seed"] = net.init_seed;
  return j;
}

MlpNetwork network_from_json(const nlohmann::json& j) {
  MlpNetwork net;
  net.layer_widths = j.at("layer_widths").get<std::vector<int>>();
  const std::string act = j.at("activation").get<std::string>();
  if (act == "swish")
    net.activation = Activation::kSwish;
  else if (act == "identity")
    net.activation = Activation::kIdentity;
  else
    fail(ErrorCode::kParseError, "unknown activation '" + act + "'");
  net.params = j.at("params").get<VecD>();
  net.init_seed = j.value("seed", std::uint64_t{0});
  if (net.params.size() != MlpNetwork::param_count(net.layer_widths))
    fail(ErrorCode::kParseError, "checkpoint parameter count does not match widths");
  return net;
}

void save_model(const DdmModel& model, const std::string& path) {
  nlohmann::json j;
  j["schema"] = 1;
  j["method"] = method_name(model.method);
  j["rho"] = model.rho;
  j["outer_iter"] = model.outer_iter;
  j["split"] = model.splits;
  j["collocation"] = model.collocation;
  j["bounds_lo"] = model.partition.bounds.lo;
  j["bounds_hi"] = model.partition.bounds.hi;
  j["transform_inputs"] = ranges_to_json(model.transform.inputs);
  j["transform_outputs"] = ranges_to_json(model.transform.outputs);
  j["param_samples"] = model.param_samples;

  nlohmann::json locals = nlohmann::json::array();
  for (const auto& net : model.local_nets) locals.push_back(network_to_json(net));
  j["local_nets"] = std::move(locals);

  nlohmann::json ifaces = nlohmann::json::array();
  for (const auto& net : model.interface_nets)
    ifaces.push_back(network_to_json(net));
  j["interface_nets"] = std::move(ifaces);

  j["lambdas"] = model.lambdas;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : model.dual_states)
    states.push_back({{"m", s.m}, {"v", s.v}, {"t", s.t}});
  j["dual_states"] = std::move(states);

  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write checkpoint " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIoError, "write failure on " + path);
}

DdmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, path + ": " + e.what());
  }

  DdmModel model;
  try {
    if (j.at("schema").get<int>() != 1)
      fail(ErrorCode::kParseError, "unsupported checkpoint schema");
    model.method = parse_method(j.at("method").get<std::string>());
    model.rho = j.at("rho").get<double>();
    model.outer_iter = j.at("outer_iter").get<int>();
    model.splits = j.at("split").get<std::vector<int>>();
    model.collocation = j.at("collocation").get<int>();
    Box bounds;
    bounds.lo = j.at("bounds_lo").get<VecD>();
    bounds.hi = j.at("bounds_hi").get<VecD>();
    model.partition = partition_grid(bounds, model.splits, model.collocation);
    model.transform.inputs = ranges_from_json(j.at("transform_inputs"));
    model.transform.outputs = ranges_from_json(j.at("transform_outputs"));
    model.param_samples = j.at("param_samples").get<std::vector<VecD>>();
    for (const auto& net : j.at("local_nets"))
      model.local_nets.push_back(network_from_json(net));
    for (const auto& net : j.at("interface_nets"))
      model.interface_nets.push_back(network_from_json(net));
    model.lambdas = j.at("lambdas").get<std::vector<VecD>>();
    for (const auto& s : j.at("dual_states")) {
      NadamState state;
      state.m = s.at("m").get<VecD>();
      state.v = s.at("v").get<VecD>();
      state.t = s.at("t").get<long>();
      model.dual_states.push_back(std::move(state));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, path + ": " + e.what());
  }

  if (model.local_nets.size() != model.partition.subdomains.size() ||
      model.interface_nets.size() != model.partition.interfaces.size() ||
      model.lambdas.size() != model.local_nets.size())
    fail(ErrorCode::kParseError, path + ": checkpoint is inconsistent");
  return model;
}

}  // namespace ddnn
