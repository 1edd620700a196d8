#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qds/adversary.hpp"
#include "qds/analysis.hpp"
#include "qds/errors.hpp"
#include "qds/keystore.hpp"
#include "qds/protocol.hpp"
#include "qds/rng.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
  std::uint64_t seed = 0;
  std::string format = "text";
  std::string keystore_path = "qds_keystore.json";

  // Protocol geometry; zero means "not set".
  std::uint32_t l_bits = 0;
  std::uint32_t n_blocks = 0;
  std::uint32_t delta_key_bits = 0;
  std::uint32_t delta_msg_bits = 0;
  std::string message_hash;
  std::string block_hash;
  std::string vb = "0";
  std::string vc = "0";

  // Attack / analysis parameters.
  std::uint64_t trials = 1;
  std::uint32_t e_blocks = 1;
  std::uint32_t t_b = 0;
  std::uint32_t x_bits = 0;
  std::uint32_t k_bits = 0;
  std::string alg;
  std::uint32_t delta_bits = 0;
  std::uint32_t d_bits = 0;
  std::string input_d;  // D for the 2pr formula; accepts "2^64" or a number
  std::uint32_t block_b_bits = 0;

  bool geometry_overridden() const {
    return l_bits || n_blocks || delta_key_bits || delta_msg_bits ||
           !message_hash.empty() || !block_hash.empty();
  }
};

qds::HashAlgorithm parse_alg_or_throw(const std::string& name) {
  auto alg = qds::parse_hash_algorithm(name);
  if (!alg) throw qds::ConfigError("unknown hash algorithm: " + name);
  return *alg;
}

// Builds the protocol configuration. Without overrides this is the
// recommended instance; with overrides, an unexpanded instance whose message
// hash output is sized to 2l.
qds::sim::ProtocolConfig build_config(const CliOptions& opt) {
  qds::sim::ProtocolConfig config;
  if (!opt.geometry_overridden()) {
    config = qds::sim::ProtocolConfig::defaults();
  } else {
    std::uint32_t n = opt.n_blocks ? opt.n_blocks
                                   : std::max<std::uint32_t>(2, opt.l_bits / 8);
    std::uint32_t l = opt.l_bits ? opt.l_bits : n * 8;
    config.qkd_l_bits = l;
    config.n_blocks = n;
    if (opt.delta_key_bits) {
      config.key_expansion_alg = qds::HashAlgorithm::Shake256;
      config.delta_key_bits = opt.delta_key_bits;
    }
    config.message_hash = opt.message_hash.empty()
                              ? qds::HashAlgorithm::Shake256
                              : parse_alg_or_throw(opt.message_hash);
    config.block_hash = opt.block_hash.empty()
                            ? qds::HashAlgorithm::Sha2_256
                            : parse_alg_or_throw(opt.block_hash);
    if (qds::is_xof(config.message_hash)) {
      config.delta_msg_bits = opt.delta_msg_bits
                                  ? opt.delta_msg_bits
                                  : 2 * config.effective_l_bits();
    }
    if (qds::is_xof(config.block_hash)) {
      config.delta_blk_bits = 2 * config.effective_l_bits();
    }
  }
  config.v_b = qds::VerificationThreshold::parse(opt.vb);
  config.v_c = qds::VerificationThreshold::parse(opt.vc);
  return config;
}

void emit(const CliOptions& opt, const json& report,
          const std::string& text) {
  if (opt.format == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

std::string describe_probability(const qds::analysis::ProbabilityValue& p) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6g (log2 = %.6g)", p.value, p.log2_value);
  return buf;
}

double parse_input_size_bits(const std::string& text) {
  if (text.rfind("2^", 0) == 0) {
    return std::exp2(std::stod(text.substr(2)));
  }
  return std::stod(text);
}

int cmd_run(const CliOptions& opt, const std::string& message_text,
            const std::string& message_file, std::uint64_t message_len,
            std::uint32_t corrupt_blocks) {
  qds::sim::ProtocolConfig config = build_config(opt);
  config.validate();

  std::vector<std::uint8_t> message;
  if (!message_file.empty()) {
    std::ifstream in(message_file, std::ios::binary);
    if (!in) throw qds::ConfigError("cannot read " + message_file);
    message.assign(std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>());
  } else if (!message_text.empty()) {
    message.assign(message_text.begin(), message_text.end());
  } else {
    qds::Rng rng = qds::Rng(opt.seed).derive("message");
    message = rng.bytes(message_len);
  }

  qds::sim::AttackHooks hooks;
  if (corrupt_blocks > 0) {
    hooks.corrupt_verifier1_key = [corrupt_blocks](qds::CombinedKey& key) {
      std::uint32_t remaining = corrupt_blocks;
      for (auto& block : key.blocks) {
        if (remaining == 0) break;
        if (block) {
          block->flip_all();
          --remaining;
        }
      }
    };
  }

  qds::sim::RunResult result =
      qds::sim::run_protocol(config, message, opt.seed, hooks);

  auto verdict_str = [](const std::optional<qds::VerificationReport>& r) {
    if (!r) return std::string("not-reached");
    return std::string(r->accepted() ? "accepted" : "rejected");
  };
  json report{{"command", "run"},
              {"config", config.to_json()},
              {"seed", opt.seed},
              {"message_bytes", message.size()},
              {"aborted", result.aborted},
              {"verifier1", verdict_str(result.verifier1_report)},
              {"verifier2", verdict_str(result.verifier2_report)}};
  if (result.verifier1_report) {
    report["verifier1_mismatches"] = result.verifier1_report->mismatches;
  }
  if (result.verifier2_report) {
    report["verifier2_mismatches"] = result.verifier2_report->mismatches;
  }

  std::string text = "verifier1: " + verdict_str(result.verifier1_report) +
                     "\nverifier2: " + verdict_str(result.verifier2_report) +
                     (result.aborted ? "\nrun aborted\n" : "\n");
  emit(opt, report, text);
  bool ok = result.verifier1_accepted() && result.verifier2_accepted();
  return ok ? 0 : 1;
}

int cmd_attack(const CliOptions& opt, const std::string& kind_name,
               const std::string& dos_target) {
  auto kind = qds::adversary::parse_attack_kind(kind_name);
  if (!kind) throw qds::ConfigError("unknown attack kind: " + kind_name);

  qds::adversary::MonteCarloParams params;
  params.config = build_config(opt);
  params.config.validate();
  params.repudiation.error_block_count = opt.e_blocks;
  params.dos.corrupt_blocks = opt.e_blocks;
  params.dos.target = dos_target == "verifier2"
                          ? qds::sim::PartyRole::Verifier2
                          : qds::sim::PartyRole::Verifier1;

  qds::adversary::MonteCarloResult result =
      qds::adversary::monte_carlo(*kind, params, opt.trials, opt.seed);

  json params_json{{"config", params.config.to_json()}};
  if (*kind == qds::adversary::AttackKind::Repudiation) {
    params_json["e"] = opt.e_blocks;
  }
  if (*kind == qds::adversary::AttackKind::Dos) {
    params_json["corrupt_blocks"] = opt.e_blocks;
    params_json["target"] = dos_target;
  }
  json report = result.to_json(params_json);

  char line[256];
  std::snprintf(line, sizeof line,
                "%s: %llu/%llu succeeded, rate %.6g, 95%% CI [%.6g, %.6g]\n",
                qds::adversary::to_string(*kind).c_str(),
                static_cast<unsigned long long>(result.successes),
                static_cast<unsigned long long>(result.trials), result.rate,
                result.ci_low, result.ci_high);
  emit(opt, report, line);
  return 0;
}

int cmd_analyze(const CliOptions& opt, const std::string& formula) {
  using namespace qds::analysis;
  json report{{"command", "analyze"}, {"formula", formula}};
  std::string text;

  if (formula == "p_rep") {
    ProbabilityValue p = p_rep_closed_form(opt.n_blocks, opt.e_blocks);
    report["params"] = {{"n", opt.n_blocks}, {"e", opt.e_blocks}};
    report["value"] = p.value;
    report["log2_value"] = p.log2_value;
    text = "p_rep(n=" + std::to_string(opt.n_blocks) +
           ", e=" + std::to_string(opt.e_blocks) +
           ") = " + describe_probability(p) + "\n";
  } else if (formula == "p_rep_threshold") {
    ProbabilityValue p =
        p_rep_threshold(opt.n_blocks, opt.e_blocks, opt.t_b);
    report["params"] = {{"n", opt.n_blocks},
                        {"e", opt.e_blocks},
                        {"t_b", opt.t_b}};
    report["value"] = p.value;
    report["log2_value"] = p.log2_value;
    text = "p_rep_threshold = " + describe_probability(p) + "\n";
  } else if (formula == "p_guess") {
    ProbabilityValue p = p_guess(opt.l_bits);
    report["params"] = {{"l", opt.l_bits}};
    report["value"] = p.value;
    report["log2_value"] = p.log2_value;
    report["work_factor"] = work_factor(opt.l_bits / 2);
    text = "p_guess(l=" + std::to_string(opt.l_bits) +
           ") = " + describe_probability(p) + "\n" + "guess work: " +
           work_factor(opt.l_bits / 2) + "\n";
  } else if (formula == "p_col") {
    CollisionParams params{opt.x_bits, opt.k_bits};
    ProbabilityValue p = p_collision(params);
    report["params"] = {{"x", opt.x_bits}, {"k", opt.k_bits}};
    report["value"] = p.value;
    report["log2_value"] = p.log2_value;
    text = "p_col(x=" + std::to_string(opt.x_bits) +
           ", k=" + std::to_string(opt.k_bits) +
           ") = " + describe_probability(p) + "\n";
  } else if (formula == "2pr") {
    double strength;
    if (!opt.alg.empty() &&
        parse_alg_or_throw(opt.alg) == qds::HashAlgorithm::Sha2_384) {
      strength = second_preimage_strength({}, qds::HashAlgorithm::Sha2_384);
    } else {
      SecondPreimageParams params;
      params.digest_d_bits = opt.d_bits;
      params.input_D_bits =
          opt.input_d.empty() ? opt.d_bits : parse_input_size_bits(opt.input_d);
      params.hash_block_B_bits = opt.block_b_bits ? opt.block_b_bits : 512;
      strength = second_preimage_strength(
          params, opt.alg.empty()
                      ? std::optional<qds::HashAlgorithm>{}
                      : std::optional(parse_alg_or_throw(opt.alg)));
    }
    report["params"] = {{"alg", opt.alg},
                        {"d", opt.d_bits},
                        {"D", opt.input_d},
                        {"B", opt.block_b_bits}};
    report["strength_bits"] = strength;
    report["work_factor"] =
        work_factor(static_cast<std::uint32_t>(strength));
    char buf[128];
    std::snprintf(buf, sizeof buf, "2PR strength: %.6g bits\nwork: %s\n",
                  strength,
                  work_factor(static_cast<std::uint32_t>(strength)).c_str());
    text = buf;
  } else if (formula == "strength") {
    qds::HashAlgorithm alg = parse_alg_or_throw(opt.alg);
    std::optional<unsigned> delta;
    if (opt.delta_bits) delta = opt.delta_bits;
    qds::StrengthTriple s = qds::strength_lookup(alg, delta);
    report["params"] = {{"alg", qds::to_string(alg)},
                        {"delta", opt.delta_bits}};
    report["collision_bits"] = s.collision_bits;
    report["preimage_bits"] = s.preimage_bits;
    report["second_preimage_lo_bits"] = s.second_preimage_lo_bits;
    report["second_preimage_hi_bits"] = s.second_preimage_hi_bits;
    report["overall_bits"] = s.overall_bits();
    report["work_factor"] = work_factor(s.overall_bits());
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: CR=%u PR=%u 2PR=%u-%u overall=%u\nwork: %s\n",
                  qds::to_string(alg).c_str(), s.collision_bits,
                  s.preimage_bits, s.second_preimage_lo_bits,
                  s.second_preimage_hi_bits, s.overall_bits(),
                  work_factor(s.overall_bits()).c_str());
    text = buf;
  } else {
    throw qds::ConfigError("unknown formula: " + formula);
  }
  emit(opt, report, text);
  return 0;
}

int cmd_keytool(const CliOptions& opt, const std::string& action,
                const std::string& link, const std::string& key_id,
                const std::string& out_path) {
  auto load_store = [&]() {
    std::ifstream probe(opt.keystore_path);
    if (!probe.good()) return qds::KeyStore{};
    return qds::KeyStore::load(opt.keystore_path);
  };

  if (action == "generate") {
    qds::KeyStore store = load_store();
    std::uint32_t l = opt.l_bits ? opt.l_bits : 256;
    qds::Rng rng = qds::Rng(opt.seed).derive("keytool:" + link);
    qds::QkdKey key = qds::simulate_qkd_link(rng, l, link);
    store.add(key);
    store.save(opt.keystore_path);
    json report{{"command", "keytool"},
                {"action", "generate"},
                {"key_id", key.key_id},
                {"link", key.link},
                {"l_bits", key.length_bits()}};
    emit(opt, report, "generated " + key.key_id + " (" +
                          std::to_string(key.length_bits()) + " bits)\n");
    return 0;
  }
  if (action == "list") {
    qds::KeyStore store = load_store();
    json keys = json::array();
    std::string text;
    for (const auto& entry : store.list()) {
      keys.push_back({{"key_id", entry.key.key_id},
                      {"link", entry.key.link},
                      {"l_bits", entry.key.length_bits()},
                      {"consumed", entry.consumed},
                      {"created_at", entry.created_at}});
      text += entry.key.key_id + " link=" + entry.key.link + " l=" +
              std::to_string(entry.key.length_bits()) +
              (entry.consumed ? " consumed" : " available") + "\n";
    }
    emit(opt, json{{"command", "keytool"}, {"action", "list"},
                   {"keys", keys}},
         text.empty() ? "no keys\n" : text);
    return 0;
  }
  if (action == "export") {
    qds::KeyStore store = load_store();
    auto entry = store.get(key_id);
    if (!entry) throw qds::Error("keytool: unknown key id " + key_id);
    json key_json{{"key_id", entry->key.key_id},
                  {"link", entry->key.link},
                  {"l_bits", entry->key.length_bits()},
                  {"bits_hex", entry->key.bits.to_hex()},
                  {"consumed", entry->consumed},
                  {"created_at", entry->created_at}};
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::trunc);
      if (!out) throw qds::Error("keytool: cannot write " + out_path);
      out << key_json.dump(2) << '\n';
    }
    emit(opt, key_json, key_json.dump(2) + "\n");
    return 0;
  }
  if (action == "consume") {
    qds::KeyStore store = load_store();
    qds::QkdKey key = store.take_for_signature(key_id);  // throws on reuse
    store.save(opt.keystore_path);
    emit(opt,
         json{{"command", "keytool"},
              {"action", "consume"},
              {"key_id", key.key_id}},
         "consumed " + key.key_id + "\n");
    return 0;
  }
  throw qds::ConfigError("unknown keytool action: " + action);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-assisted digital signature toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  app.set_config("--config", "", "Flat key=value configuration file");
  app.add_option("--seed", opt.seed, "Run seed")->envname("QDS_SEED");
  app.add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--keystore", opt.keystore_path, "Key store path");
  app.add_option("--l", opt.l_bits, "Key length in bits");
  app.add_option("--n", opt.n_blocks, "Blocks per key");
  app.add_option("--delta-key", opt.delta_key_bits,
                 "Expanded key length in bits (SHAKE-256)");
  app.add_option("--delta-msg", opt.delta_msg_bits,
                 "Message digest length in bits for XOF message hashes");
  app.add_option("--message-hash", opt.message_hash, "Message hash");
  app.add_option("--block-hash", opt.block_hash, "Block hash");
  app.add_option("--vb", opt.vb, "Verifier 1 threshold (0.25, 25%, 1/4)");
  app.add_option("--vc", opt.vc, "Verifier 2 threshold");
  app.add_option("--trials", opt.trials, "Monte Carlo trials");
  app.add_option("--e", opt.e_blocks, "Corrupted block count");
  app.add_option("--tb", opt.t_b, "Verifier 1 mismatch tolerance (blocks)");
  app.add_option("--x", opt.x_bits, "Collision input length in bits");
  app.add_option("--k", opt.k_bits, "Collision digest length in bits");
  app.add_option("--alg", opt.alg, "Hash algorithm name");
  app.add_option("--delta", opt.delta_bits, "XOF output length in bits");
  app.add_option("--d", opt.d_bits, "Digest size in bits");
  app.add_option("--D", opt.input_d, "Input size in bits (accepts 2^N)");
  app.add_option("--B", opt.block_b_bits, "Hash input block size in bits");

  std::string message_text, message_file;
  std::uint64_t message_len = 32;
  std::uint32_t corrupt_blocks = 0;
  auto* run = app.add_subcommand("run", "Run the honest protocol end to end");
  run->fallthrough();
  run->add_option("--message", message_text, "Inline message");
  run->add_option("--message-file", message_file, "Message from a file");
  run->add_option("--message-len", message_len,
                  "Random message length in bytes");
  run->add_option("--corrupt-blocks", corrupt_blocks,
                  "Corrupt this many verifier-1 blocks before verification");

  std::string attack_kind;
  std::string dos_target = "verifier1";
  auto* attack = app.add_subcommand("attack", "Run an attack campaign");
  attack->fallthrough();
  attack->add_option("kind", attack_kind,
                     "integrity | forgery | forgery-reuse | repudiation | dos")
      ->required();
  attack->add_option("--target", dos_target, "DoS target verifier")
      ->check(CLI::IsMember({"verifier1", "verifier2"}));

  std::string formula;
  auto* analyze = app.add_subcommand("analyze", "Evaluate a security formula");
  analyze->fallthrough();
  analyze
      ->add_option("formula", formula,
                   "p_rep | p_rep_threshold | p_guess | p_col | 2pr | strength")
      ->required();

  std::string key_action, key_link = "alice-bob", key_id, key_out;
  auto* keytool = app.add_subcommand("keytool", "Manage the key store");
  keytool->fallthrough();
  keytool->add_option("action", key_action, "generate | list | export | consume")
      ->required();
  keytool->add_option("--link", key_link, "Link name for generate");
  keytool->add_option("--key-id", key_id, "Key id for export/consume");
  keytool->add_option("--out", key_out, "Export file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      return cmd_run(opt, message_text, message_file, message_len,
                     corrupt_blocks);
    }
    if (attack->parsed()) {
      return cmd_attack(opt, attack_kind, dos_target);
    }
    if (analyze->parsed()) {
      return cmd_analyze(opt, formula);
    }
    if (keytool->parsed()) {
      return cmd_keytool(opt, key_action, key_link, key_id, key_out);
    }
  } catch (const qds::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qds::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const qds::KeyConsumedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const qds::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
