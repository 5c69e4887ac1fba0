#include <charconv>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "memlb/errors.hpp"
#include "memlb/io.hpp"

namespace memlb {

namespace {

using Json = nlohmann::ordered_json;

Params params_from(const Json& j) {
  Params p;
  p.profile = profile_from_string(j.at("profile").get<std::string>());
  p.d = j.at("d").get<int>();
  p.delta = j.at("delta").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.n_terms = j.at("n_terms").get<std::int64_t>();
  p.log_l_scale = j.at("log_l_scale").get<double>();
  p.l_scale = j.at("l_scale").get<double>();
  p.s_corr = j.at("s_corr").get<double>();
  p.k_msg = j.at("k_msg").get<std::int64_t>();
  p.n_rows = j.at("n_rows").get<std::int64_t>();
  p.xi = j.at("xi").get<double>();
  p.xi_prime = j.at("xi_prime").get<double>();
  p.eps = j.at("eps").get<double>();
  p.log_base = j.at("log_base").get<double>();
  return p;
}

Json vector_json(const Vector& x) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(x[i]);
  return arr;
}

Vector vector_from(const Json& arr) {
  Vector x(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) x[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return x;
}

}  // namespace

std::string format_double(double x) {
  // Shortest form that round-trips.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  Json header;
  header["type"] = "header";
  header["algorithm"] = t.algorithm;
  header["alg_seed"] = t.alg_seed;
  header["t_budget"] = t.t_budget;
  header["instance_seed"] = t.instance.seed;
  header["instance_digest"] = t.instance.digest;
  header["params"] = Json::parse(params_to_json(t.instance.params));
  out += header.dump() + "\n";
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    Json line;
    line["t"] = r + 1;
    line["x"] = vector_json(t.rounds[r].x);
    line["value"] = t.rounds[r].answer.value;
    line["provenance"] = t.rounds[r].answer.provenance.to_string();
    line["state_bits"] = t.state_sizes.at(r);
    out += line.dump() + "\n";
  }
  return out;
}

Transcript transcript_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Transcript t;
  bool have_header = false;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      if (j.value("type", "") == "config") continue;
      if (!have_header) {
        if (j.value("type", "") != "header") throw FormatError("transcript must start with a header record");
        t.algorithm = j.at("algorithm").get<std::string>();
        t.alg_seed = j.at("alg_seed").get<std::uint64_t>();
        t.t_budget = j.at("t_budget").get<std::size_t>();
        t.instance.seed = j.at("instance_seed").get<std::uint64_t>();
        t.instance.digest = j.at("instance_digest").get<std::uint64_t>();
        t.instance.params = params_from(j.at("params"));
        have_header = true;
        continue;
      }
      Round round;
      round.x = vector_from(j.at("x"));
      round.answer.value = j.at("value").get<double>();
      round.answer.provenance = Term::parse(j.at("provenance").get<std::string>());
      t.state_sizes.push_back(j.at("state_bits").get<std::size_t>());
      if (j.at("t").get<std::size_t>() != t.rounds.size() + 1) throw FormatError("round numbers out of sequence");
      t.rounds.push_back(std::move(round));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed transcript: ") + e.what());
  }
  if (!have_header) throw FormatError("empty transcript");
  if (!t.rounds.empty()) t.final_output = t.rounds.back().x;
  return t;
}

}  // namespace memlb
