#include <doctest.h>

#include <sstream>

#include "cge/parser.hpp"
#include "cge/patterns.hpp"
#include "cge/pipeline.hpp"
#include "support/pattern_table.hpp"

using namespace cge;

namespace {

PatternReport run_case(const testsupport::PatternCase& pc) {
  auto parsed = parse_text(pc.source);
  REQUIRE(!parsed.contracts.empty());
  auto fn = resolve_function(parsed.contracts[0], pc.function);
  return extract_patterns(fn, pc.kind);
}

}  // namespace

TEST_CASE("table-driven sub-pattern ground truth") {
  for (const auto& pc : testsupport::pattern_cases()) {
    CAPTURE(pc.name);
    auto report = run_case(pc);
    auto ids = sub_patterns_of(pc.kind);
    for (size_t i = 0; i < ids.size(); ++i) {
      CAPTURE(to_string(ids[i]));
      CHECK(report.flag(ids[i]) == pc.expected[i]);
    }
  }
}

TEST_CASE("bank withdraw raises every reentrancy flag with evidence lines") {
  auto pc = testsupport::bank_withdraw_case();
  auto report = run_case(pc);
  CHECK(report.flag(SubPatternId::CallValueInvocation));
  CHECK(report.flag(SubPatternId::BalanceDeduction));
  CHECK(report.flag(SubPatternId::EnoughBalance));
  // the source is laid out so the check sits on line 8, the transfer on 9,
  // the deduction on 10
  CHECK(report.evidence.at(SubPatternId::EnoughBalance).front().line == 8);
  CHECK(report.evidence.at(SubPatternId::CallValueInvocation).front().line == 9);
  CHECK(report.evidence.at(SubPatternId::BalanceDeduction).front().line == 10);
}

TEST_CASE("every true flag carries evidence that lands on source text") {
  auto cases = testsupport::pattern_cases();
  cases.push_back(testsupport::bank_withdraw_case());
  for (const auto& pc : cases) {
    CAPTURE(pc.name);
    auto report = run_case(pc);
    for (auto id : sub_patterns_of(pc.kind)) {
      if (!report.flag(id)) continue;
      auto it = report.evidence.find(id);
      REQUIRE(it != report.evidence.end());
      REQUIRE(!it->second.empty());
      for (const auto& pos : it->second) {
        CHECK(pos.line >= 1);
        CHECK(pos.column >= 1);
      }
    }
  }
}

TEST_CASE("evidence positions point at the triggering construct") {
  auto pc = testsupport::bank_withdraw_case();
  auto report = run_case(pc);
  auto line_text = [&](int line) {
    std::istringstream in(pc.source);
    std::string text;
    for (int i = 0; i < line; ++i) std::getline(in, text);
    return text;
  };
  const auto cv = report.evidence.at(SubPatternId::CallValueInvocation).front();
  CHECK(line_text(cv.line).find("call.value") != std::string::npos);
  const auto bd = report.evidence.at(SubPatternId::BalanceDeduction).front();
  CHECK(line_text(bd.line).find("-=") != std::string::npos);
  const auto eb = report.evidence.at(SubPatternId::EnoughBalance).front();
  CHECK(line_text(eb.line).find(">=") != std::string::npos);
}

TEST_CASE("functions without call.value force both dependent flags off") {
  const char* src = R"(
contract C {
    mapping(address => uint) balances;
    function f(uint amount) public {
        require(balances[msg.sender] >= amount);
        balances[msg.sender] -= amount;
    }
}
)";
  auto parsed = parse_text(src);
  auto fn = resolve_function(parsed.contracts[0], "f");
  auto report = extract_reentrancy(fn);
  CHECK(!report.flag(SubPatternId::CallValueInvocation));
  CHECK(!report.flag(SubPatternId::BalanceDeduction));
  CHECK(!report.flag(SubPatternId::EnoughBalance));
}

TEST_CASE("transfer/send occurrences are noted without raising the flag") {
  const char* src = R"(
contract C {
    function f(uint amount) public {
        msg.sender.transfer(amount);
    }
}
)";
  auto parsed = parse_text(src);
  auto fn = resolve_function(parsed.contracts[0], "f");
  auto report = extract_reentrancy(fn);
  CHECK(!report.flag(SubPatternId::CallValueInvocation));
  REQUIRE(report.money_transfer_notes.size() == 1);
}

TEST_CASE("encode_patterns: one-hot blocks end with the presence digit") {
  PatternReport report;
  report.kind = VulnerabilityKind::Reentrancy;
  report.flags[SubPatternId::CallValueInvocation] = false;
  report.flags[SubPatternId::BalanceDeduction] = false;
  report.flags[SubPatternId::EnoughBalance] = false;
  auto all_false = encode_patterns(report);
  for (size_t block = 0; block < 3; ++block) {
    CHECK(all_false.values[block * 10 + 9] == 0.0);
    // one-hot prefix: exactly one bit at the sub-pattern's global ordinal
    double sum = 0;
    for (size_t j = 0; j < 9; ++j) sum += all_false.values[block * 10 + j];
    CHECK(sum == 1.0);
    CHECK(all_false.values[block * 10 + block] == 1.0);
  }

  report.flags[SubPatternId::CallValueInvocation] = true;
  report.flags[SubPatternId::BalanceDeduction] = true;
  report.flags[SubPatternId::EnoughBalance] = true;
  auto all_true = encode_patterns(report);
  for (size_t block = 0; block < 3; ++block)
    CHECK(all_true.values[block * 10 + 9] == 1.0);
}

TEST_CASE("encode_patterns: timestamp blocks use the global ordinals 3..5") {
  PatternReport report;
  report.kind = VulnerabilityKind::TimestampDependence;
  report.flags[SubPatternId::TimestampInvocation] = true;
  report.flags[SubPatternId::TimestampAssign] = false;
  report.flags[SubPatternId::TimestampContamination] = true;
  auto vec = encode_patterns(report);
  CHECK(vec.values[0 * 10 + 3] == 1.0);
  CHECK(vec.values[1 * 10 + 4] == 1.0);
  CHECK(vec.values[2 * 10 + 5] == 1.0);
  CHECK(vec.values[0 * 10 + 9] == 1.0);
  CHECK(vec.values[1 * 10 + 9] == 0.0);
  CHECK(vec.values[2 * 10 + 9] == 1.0);
}

TEST_CASE("encode_patterns is injective over the eight flag combinations") {
  for (auto kind :
       {VulnerabilityKind::Reentrancy, VulnerabilityKind::TimestampDependence,
        VulnerabilityKind::InfiniteLoop}) {
    std::set<std::array<double, 30>> seen;
    auto ids = sub_patterns_of(kind);
    for (int bits = 0; bits < 8; ++bits) {
      PatternReport report;
      report.kind = kind;
      for (size_t i = 0; i < 3; ++i) report.flags[ids[i]] = (bits >> i) & 1;
      seen.insert(encode_patterns(report).values);
    }
    CHECK(seen.size() == 8);
  }
}

TEST_CASE("report serializes to the documented JSON shape") {
  auto report = run_case(testsupport::bank_withdraw_case());
  const std::string json = to_json(report);
  CHECK(json.find("\"kind\":\"reentrancy\"") != std::string::npos);
  CHECK(json.find("\"callValueInvocation\":true") != std::string::npos);
  CHECK(json.find("\"pattern\":\"callValueInvocation\"") != std::string::npos);
  CHECK(json.find("\"line\":9") != std::string::npos);
}
