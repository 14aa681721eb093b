#include <doctest.h>

#include "cge/parser.hpp"
#include "cge/taint.hpp"
#include "support/generators.hpp"

using namespace cge;

namespace {

FunctionAst parse_fn(const std::string& body) {
  const std::string src = "contract T { uint total; function f() public {\n" +
                          body + "\n} }";
  auto parsed = parse_text(src);
  return resolve_function(parsed.contracts[0], "f");
}

Expression ts_seed() {
  Expression e;
  e.kind = ExprKind::BlockTimestamp;
  return e;
}

Expression ident_seed(const std::string& name) {
  Expression e;
  e.kind = ExprKind::Identifier;
  e.text = name;
  return e;
}

}  // namespace

TEST_CASE("taint: timestamp seed flows through assignments") {
  auto fn = parse_fn("uint a = block.timestamp; uint b = a + 1; uint c = 2;");
  auto state = taint_propagate(fn, {ts_seed()});
  CHECK(state.tainted == std::set<std::string>{"a", "b"});
}

TEST_CASE("taint: empty seed set taints nothing") {
  auto fn = parse_fn("uint a = 1; uint b = a;");
  auto state = taint_propagate(fn, {});
  CHECK(state.tainted.empty());
}

TEST_CASE("taint: flow-insensitive closure keeps overwritten variables") {
  auto fn = parse_fn("uint x = 1; uint y = x; x = 0; uint z = x;");
  auto state = taint_propagate(fn, {ident_seed("x")});
  CHECK(state.tainted == std::set<std::string>{"x", "y", "z"});
}

TEST_CASE("taint: index access of a tainted base is tainted") {
  const std::string src = R"(
contract T {
    mapping(address => uint) book;
    function f() public {
        book[msg.sender] = block.timestamp;
        uint v = book[msg.sender];
    }
}
)";
  auto parsed = parse_text(src);
  auto fn = resolve_function(parsed.contracts[0], "f");
  auto state = taint_propagate(fn, {ts_seed()});
  CHECK(state.is_tainted("book"));
  CHECK(state.is_tainted("v"));
}

TEST_CASE("taint: matches the brute-force oracle on random programs") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    auto prog = testsupport::gen_straightline(rng);
    auto parsed = parse_text(prog.source);
    REQUIRE(parsed.contracts.size() == 1);
    auto fn = resolve_function(parsed.contracts[0], "f");

    std::vector<Expression> seeds;
    seeds.push_back(prog.timestamp_seed ? ts_seed() : ident_seed(prog.seed_var));
    auto state = taint_propagate(fn, seeds);

    auto expected = testsupport::taint_oracle(prog);
    CHECK(state.tainted == expected);
  }
}

TEST_CASE("taint: monotone in the seed set") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto prog = testsupport::gen_straightline(rng);
    auto parsed = parse_text(prog.source);
    auto fn = resolve_function(parsed.contracts[0], "f");

    auto small = taint_propagate(fn, {ident_seed("v0")});
    auto large = taint_propagate(fn, {ident_seed("v0"), ident_seed("v1")});
    for (const auto& name : small.tainted) CHECK(large.tainted.count(name) == 1);
  }
}
