// Copyright 2026 The compoundcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "compoundcap/capacity.hpp"
#include "compoundcap/codes.hpp"
#include "compoundcap/entropy.hpp"
#include "compoundcap/io.hpp"
#include "compoundcap/linalg.hpp"

namespace compoundcap::cli {
namespace {

struct Failure : std::runtime_error {
  Failure(int c, const std::string& m) : std::runtime_error(m), code(c) {}
  int code;
};

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (!c.channel.empty()) j["channel"] = c.channel;
  if (!c.compound.empty()) j["compound"] = c.compound;
  if (!c.state.empty()) j["state"] = c.state;
  if (!c.states.empty()) j["states"] = c.states;
  j["m0"] = c.m0;
  j["m1"] = c.m1;
  j["eps"] = c.eps;
  j["n"] = c.n;
  j["samples"] = c.samples;
  if (c.seed) j["seed"] = *c.seed;
  j["tol"] = c.tol;
  j["format"] = c.format;
  if (c.command == "capacity") {
    j["variant"] = c.variant;
    j["classical"] = c.classical;
  }
  if (c.command == "oneshot") j["mode"] = c.mode;
  if (c.command == "entropy") {
    j["dims"] = c.dims;
    j["quantities"] = c.quantities;
  }
  return j;
}

Json entropy_json(const EntropyValue& v) {
  Json j;
  j["bits"] = v.bits;
  j["lower"] = v.lower;
  j["upper"] = v.upper;
  j["status"] = v.solver_status;
  j["certified"] = v.certified;
  return j;
}

Json bound_json(const AnalyticBound& b) {
  Json j;
  j["value"] = b.value;
  j["delta1"] = b.delta1;
  j["delta2"] = b.delta2;
  j["nontrivial"] = b.nontrivial();
  return j;
}

Json report_json(const OneShotReport& r) {
  Json j;
  j["fidelities"] = r.fidelities;
  j["min_fidelity"] = r.min_fidelity;
  j["bound"] = bound_json(r.bound);
  j["bound_respected"] = r.bound_respected;
  j["construction"] = r.construction;
  j["distinct_members"] = r.distinct_members;
  j["branch_of"] = r.branch_of;
  j["attempts"] = r.attempts;
  j["retry_cap_hit"] = r.retry_cap_hit;
  j["encoder_deviation"] = r.encoder_deviation;
  j["encoder_expectation"] = r.encoder_expectation;
  j["decoding_error"] = r.decoding_error;
  j["decoding_expectation"] = r.decoding_expectation;
  j["seed"] = r.seed;
  return j;
}

Json report_json(const DecouplingReport& r) {
  Json j;
  j["empirical_mean_deviation"] = r.empirical_mean_deviation;
  j["std_error"] = r.std_error;
  j["sample_count"] = r.sample_count;
  j["bound_value"] = r.bound_value;
  j["pass"] = r.pass;
  j["h2"] = r.h2;
  j["deviations"] = r.deviations;
  j["seed"] = r.seed;
  return j;
}

Json rows_json(const RMatrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[k] = m(i, k);
    j.push_back(row);
  }
  return j;
}

Json report_json(const EstimationReport& r) {
  Json j;
  j["copies"] = r.copies;
  j["exact_success"] = r.exact_success;
  j["confusion"] = rows_json(r.confusion);
  j["empirical_success"] = r.empirical_success;
  j["std_error"] = r.std_error;
  j["trials"] = r.trials;
  j["indistinguishable"] = r.indistinguishable;
  j["seed"] = r.seed;
  return j;
}

Json report_json(const ProtocolTranscript& t) {
  Json j;
  j["n"] = t.n;
  j["m"] = t.m;
  j["L"] = t.l;
  j["t"] = t.t;
  j["m0"] = t.m0;
  j["m1"] = t.m1i;
  j["estimation"] = report_json(t.estimation);
  j["block_fidelity"] = rows_json(t.block_fidelity);
  j["code_fidelity"] = t.code_fidelity;
  j["member_fidelity"] = t.member_fidelity;
  j["total_fidelity"] = t.total_fidelity;
  j["product_lower"] = t.product_lower;
  j["rate"] = t.rate;
  j["code_attempts"] = t.code_attempts;
  j["seed"] = t.seed;
  return j;
}

CompoundChannel load_compound(const RunConfig& c) {
  if (!c.compound.empty()) return read_compound(c.compound);
  if (!c.channel.empty()) return CompoundChannel({read_channel(c.channel)});
  throw InputError("field 'compound': --compound or --channel is required");
}

std::uint64_t need_seed(const RunConfig& c) {
  if (!c.seed) throw InputError("field 'seed': --seed is required for stochastic commands");
  return *c.seed;
}

CVector phi_vector(int d) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int a = 0; a < d; ++a) v(a * d + a) = 1 / std::sqrt(double(d));
  return v;
}

// One pure input per member: --states file (array or single state), else Phi+.
std::vector<CVector> load_states(const RunConfig& c, int members, int d_a) {
  if (c.states.empty()) return std::vector<CVector>(members, phi_vector(d_a));
  const Json j = read_json_file(c.states);
  std::vector<CVector> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(pure_state_from_json(e).vector());
  } else {
    out.push_back(pure_state_from_json(j).vector());
  }
  if (out.size() == 1) out.resize(members, out.front());
  if (static_cast<int>(out.size()) != members) throw InputError("field 'states': one state per member required");
  for (const auto& v : out)
    if (v.size() != static_cast<Eigen::Index>(d_a) * d_a) throw InputError("field 'states': states must live on [A, A']");
  return out;
}

std::vector<int> m1_list(const RunConfig& c, int members) {
  if (c.m1.size() == 1) return std::vector<int>(members, c.m1[0]);
  if (static_cast<int>(c.m1.size()) != members) throw InputError("field 'm1': give one value or one per member");
  return c.m1;
}

std::map<std::string, double> key_values(const std::vector<std::string>& tokens, const std::string& field) {
  std::map<std::string, double> kv;
  for (const auto& tok : tokens) {
    std::stringstream ss(tok);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("field '" + field + "': expected key=value, got '" + item + "'");
      try {
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw InputError("field '" + field + "': bad number in '" + item + "'");
      }
    }
  }
  return kv;
}

double need(const std::map<std::string, double>& kv, const std::string& key, const std::string& field) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InputError("field '" + field + "': missing key '" + key + "'");
  return it->second;
}

int need_int(const std::map<std::string, double>& kv, const std::string& key, const std::string& field) {
  const double v = need(kv, key, field);
  if (v != std::floor(v)) throw InputError("field '" + field + "': key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

// ---- commands -----------------------------------------------------------------

Json cmd_capacity(const RunConfig& c, int& code) {
  const CompoundChannel pi = load_compound(c);
  const CapacityResult r = qe(variant_from_string(c.variant), pi, c.tol);
  Json j;
  j["bits_per_use"] = r.bits_per_use;
  if (c.classical) j["classical_bits_per_use"] = 2 * r.bits_per_use;
  j["gap"] = r.gap;
  j["active_indices"] = r.active_indices;
  j["optimizer"] = to_json(r.optimizer);
  j["iterations"] = r.iterations;
  j["status"] = r.status;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.status != "optimal") code = kNumeric;
  return j;
}

Json cmd_entropy(const RunConfig& c, int& code) {
  if (c.state.empty()) throw InputError("field 'state': --state is required");
  const DensityOperator rho = read_state(c.state);
  std::vector<int> dims = c.dims;
  if (dims.empty()) dims = rho.layout().dims();
  if (dims.size() == 1) dims.push_back(1);
  if (dims.size() != 2 || dims[0] * dims[1] != rho.dim())
    throw InputError("field 'dims': need d_A,d_B matching the state");
  const int da = dims[0], db = dims[1];
  const CMatrix& m = rho.matrix();
  std::vector<std::string> q = c.quantities;
  if (q.empty()) q = {"hmin", "hmax", "cond"};
  Json j;
  for (const auto& name : q) {
    EntropyValue v;
    if (name == "hmin") {
      v = h_min(m, da, db, std::min(c.tol, 1e-7));
    } else if (name == "hmax") {
      v = h_max(m, da, db, std::min(c.tol, 1e-7));
    } else if (name == "hmax-fidelity") {
      v = h_max_fidelity_form(m, da, db, std::min(c.tol, 1e-7));
    } else if (name == "smooth-hmin") {
      v = smooth_h_min(m, da, db, c.eps, std::min(c.tol, 1e-7));
    } else if (name == "smooth-hmax") {
      v = smooth_h_max(m, da, db, c.eps, std::min(c.tol, 1e-7));
    } else if (name == "collision") {
      v = collision_entropy(m, da, db);
    } else if (name == "cond") {
      v.bits = v.lower = v.upper = cond_entropy(m, da, db);
      v.solver_status = "exact";
    } else {
      throw InputError("field 'quantities': unknown quantity '" + name + "'");
    }
    if (!v.certified) code = kNumeric;
    j[name] = entropy_json(v);
  }
  return j;
}

Json cmd_decouple(const RunConfig& c, int&) {
  const CompoundChannel pi = load_compound(c);
  const auto rho = load_states(c, pi.size(), pi.d_in());
  return report_json(mc_decoupling_L5(pi, rho, c.m0, m1_list(c, pi.size()), c.samples, need_seed(c)));
}

Json cmd_oneshot(const RunConfig& c, int&) {
  const CompoundChannel pi = load_compound(c);
  const auto rho = load_states(c, pi.size(), pi.d_in());
  const std::uint64_t seed = need_seed(c);
  OneShotOptions opt;
  opt.eps = c.eps;
  if (c.mode == "is") return report_json(run_one_shot_is(pi, rho, c.m0, m1_list(c, pi.size()), seed, opt));
  if (c.mode == "uninformed") {
    if (c.m1.size() != 1) throw InputError("field 'm1': uninformed codes take a single M1");
    return report_json(run_one_shot_uninformed(pi, rho.front(), c.m0, c.m1[0], seed, opt));
  }
  if (c.mode == "plain") return report_json(plain_is_experiment(pi, rho, c.m0, seed, opt));
  throw InputError("field 'mode': expected is, uninformed or plain");
}

Json cmd_feedback(const RunConfig& c, int&, bool samples_given) {
  const CompoundChannel pi = load_compound(c);
  const int trials = samples_given ? c.samples : 10000;
  return report_json(feedback_protocol_sim(pi, c.n, c.m0, m1_list(c, pi.size()), need_seed(c), trials, c.eps));
}

Json cmd_bounds(const RunConfig& c, int&) {
  Json j = Json::object();
  if (!c.net.empty()) {
    const auto kv = key_values(c.net, "net");
    const double nu = need(kv, "nu", "net");
    const int dab = need_int(kv, "dab", "net");
    j["net"] = {{"nu", nu}, {"dab", dab}, {"log2_size", net_cardinality_bound(nu, dab)}};
  }
  if (!c.net_at.empty()) {
    const auto kv = key_values(c.net_at, "net-at");
    const int n = need_int(kv, "n", "net-at"), dab = need_int(kv, "dab", "net-at");
    const NetBoundAtN b = net_cardinality_bound_at(n, dab);
    j["net_at"] = {{"n", n}, {"dab", dab}, {"log2_six_n2", b.log2_six_n2}, {"log2_three_n", b.log2_three_n}};
  }
  if (!c.continuity.empty()) {
    const auto kv = key_values(c.continuity, "continuity");
    const double q = need(kv, "qe", "continuity"), eps = need(kv, "eps", "continuity");
    const int da = need_int(kv, "da", "continuity");
    j["continuity"] = {{"qe", q}, {"da", da}, {"eps", eps}, {"rate", continuity_rate_from(q, da, eps)}};
  }
  if (!c.converse.empty()) {
    const auto kv = key_values(c.converse, "converse");
    const double mi = need(kv, "maxi", "converse"), delta = need(kv, "delta", "converse");
    const int n = need_int(kv, "n", "converse");
    j["converse"] = {{"maxi", mi}, {"n", n}, {"delta", delta}, {"rate", converse_bound_from(mi, n, delta)}};
  }
  if (!c.union_bound.empty()) {
    const auto kv = key_values(c.union_bound, "union");
    const double f = need(kv, "f", "union");
    const int n = need_int(kv, "n", "union");
    j["union"] = {{"f", f}, {"n", n}, {"min_fidelity", union_bound_transfer(f, n)}};
  }
  if (!c.aep.empty()) {
    const auto kv = key_values(c.aep, "aep");
    const double eps = need(kv, "eps", "aep");
    const int da = need_int(kv, "da", "aep"), n = need_int(kv, "n", "aep");
    const AepDelta d = aep_delta(eps, da, n);
    j["aep"] = {{"eps", eps}, {"da", da}, {"n", n}, {"delta", d.value}, {"valid", d.valid}};
  }
  if (!c.superdense.empty()) {
    const auto kv = key_values(c.superdense, "superdense");
    const ClassicalParams p = superdense_convert(static_cast<long long>(need(kv, "m0", "superdense")),
                                                 static_cast<long long>(need(kv, "m1", "superdense")),
                                                 need(kv, "err", "superdense"));
    j["superdense"] = {{"m0", p.m0}, {"m1", p.m1}, {"error", p.error}};
  }
  if (!c.teleport.empty()) {
    const auto kv = key_values(c.teleport, "teleport");
    const QuantumParams p = teleport_convert({static_cast<long long>(need(kv, "m0", "teleport")),
                                              static_cast<long long>(need(kv, "m1", "teleport")),
                                              need(kv, "err", "teleport")});
    j["teleport"] = {{"m0", p.m0}, {"m1", p.m1}, {"error", p.error}, {"flagged", p.flagged}};
  }
  if (j.empty()) throw InputError("field 'bounds': request at least one evaluator (--net, --continuity, ...)");
  return j;
}

// ---- output --------------------------------------------------------------------

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), os);
  } else {
    os << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

std::string render(const RunConfig& c, const Json& doc) {
  std::ostringstream os;
  if (c.format == "json") {
    os << doc.dump(2) << '\n';
  } else if (c.command == "decouple") {
    os << "sample,deviation\n";
    const auto& d = doc["result"]["deviations"];
    for (size_t i = 0; i < d.size(); ++i) os << i << ',' << d[i].dump() << '\n';
  } else {
    os << "key,value\n";
    flatten(doc, "", os);
  }
  return os.str();
}

void add_common(CLI::App* s, RunConfig& c) {
  s->add_option("--channel", c.channel, "channel JSON file");
  s->add_option("--compound", c.compound, "compound channel JSON file");
  s->add_option("--m0", c.m0, "message dimension M0")->check(CLI::PositiveNumber);
  s->add_option("--m1", c.m1, "entanglement dimension(s) M1, comma separated")->delimiter(',');
  s->add_option("--eps", c.eps, "smoothing parameter")->check(CLI::Range(0.0, 1.0));
  s->add_option("--n", c.n, "block length")->check(CLI::PositiveNumber);
  s->add_option("--samples", c.samples, "Monte-Carlo samples or trials")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", c.seed, "RNG seed");
  s->add_option("--tol", c.tol, "solver tolerance")->check(CLI::PositiveNumber);
  s->add_option("--out", c.out, "output file (default stdout)");
  s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"compoundcap: entanglement-assisted capacities of compound quantum channels"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* cap = app.add_subcommand("capacity", "max-min entanglement-assisted capacity");
  add_common(cap, c);
  cap->add_option("--variant", c.variant, "uninformed, informed-receiver, informed-sender, feedback");
  cap->add_flag("--classical", c.classical, "also report the classical capacity (twice the quantum value)");

  auto* ent = app.add_subcommand("entropy", "entropic quantities of a bipartite state");
  add_common(ent, c);
  ent->add_option("--state", c.state, "state JSON file")->required();
  ent->add_option("--dims", c.dims, "d_A,d_B")->delimiter(',');
  for (const char* q : {"hmin", "hmax", "hmax-fidelity", "smooth-hmin", "smooth-hmax", "collision", "cond"})
    ent->add_flag_callback(std::string("--") + q, [&c, q] { c.quantities.emplace_back(q); });

  auto* dec = app.add_subcommand("decouple", "Monte-Carlo check of the averaged decoupling bound");
  add_common(dec, c);
  dec->add_option("--states", c.states, "pure input states JSON (default Phi+)");

  auto* one = app.add_subcommand("oneshot", "construct and evaluate a one-shot code");
  add_common(one, c);
  one->add_option("--states", c.states, "pure input states JSON (default Phi+)");
  one->add_option("--mode", c.mode, "is, uninformed or plain")->check(CLI::IsMember({"is", "uninformed", "plain"}));

  auto* fb = app.add_subcommand("feedback", "estimation plus informed-sender protocol");
  add_common(fb, c);

  auto* bnd = app.add_subcommand("bounds", "closed-form evaluators");
  add_common(bnd, c);
  bnd->add_option("--net", c.net, "nu=..,dab=..");
  bnd->add_option("--net-at", c.net_at, "n=..,dab=..");
  bnd->add_option("--continuity", c.continuity, "qe=..,da=..,eps=..");
  bnd->add_option("--converse", c.converse, "maxi=..,n=..,delta=..");
  bnd->add_option("--union", c.union_bound, "f=..,n=..");
  bnd->add_option("--aep", c.aep, "eps=..,da=..,n=..");
  bnd->add_option("--superdense", c.superdense, "m0=..,m1=..,err=..");
  bnd->add_option("--teleport", c.teleport, "m0=..,m1=..,err=..");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kInput;
  }
  c.command = app.get_subcommands().front()->get_name();

  int code = kOk;
  try {
    for (int v : c.m1)
      if (v < 1) throw InputError("field 'm1': values must be >= 1");
    Json result;
    if (c.command == "capacity") result = cmd_capacity(c, code);
    else if (c.command == "entropy") result = cmd_entropy(c, code);
    else if (c.command == "decouple") result = cmd_decouple(c, code);
    else if (c.command == "oneshot") result = cmd_oneshot(c, code);
    else if (c.command == "feedback") result = cmd_feedback(c, code, fb->count("--samples") > 0);
    else result = cmd_bounds(c, code);

    Json doc;
    doc["command"] = c.command;
    doc["config"] = config_json(c);
    doc["result"] = std::move(result);
    const std::string text = render(c, doc);
    if (c.out.empty()) {
      out << text;
    } else {
      std::ofstream f(c.out, std::ios::binary);
      if (!f) throw InputError("field 'out': cannot open '" + c.out + "' for writing");
      f << text;
    }
    return code;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace compoundcap::cli
