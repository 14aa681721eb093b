#include <doctest.h>

#include <map>
#include <set>

#include "cge/graph.hpp"
#include "cge/parser.hpp"
#include "support/pattern_table.hpp"

using namespace cge;

namespace {

const char* kFig3Source = R"(pragma solidity ^0.4.19;
contract Vulnerable {
    mapping(address => uint) private Balance;
    function withdraw(uint amount) public {
        require(Balance[msg.sender] >= amount);
        msg.sender.call.value(amount)();
        Balance[msg.sender] -= amount;
    }
}
)";

FunctionAst fig3_withdraw() {
  auto parsed = parse_text(kFig3Source);
  return resolve_function(parsed.contracts[0], "withdraw");
}

FunctionAst parse_fn(const std::string& src, const std::string& name) {
  auto parsed = parse_text(src);
  return resolve_function(parsed.contracts[0], name);
}

const GraphNode& node_by_label(const ContractGraph& g, const std::string& label) {
  for (const auto& n : g.nodes)
    if (n.label == label) return n;
  REQUIRE(false);
  static GraphNode dummy;
  return dummy;
}

}  // namespace

TEST_CASE("Fig.3 withdraw: node set and roles") {
  auto g = build_graph(fig3_withdraw(), VulnerabilityKind::Reentrancy);

  std::set<std::string> labels;
  for (const auto& n : g.nodes) labels.insert(n.label);
  CHECK(labels == std::set<std::string>{"C1", "C2", "C3", "N1", "F"});

  CHECK(node_by_label(g, "C1").name == "withdraw");
  CHECK(node_by_label(g, "C1").sub_role == NodeSubRole::Invocation);
  CHECK(node_by_label(g, "C1").caller_class == CallerClass::MsgSender);
  CHECK(node_by_label(g, "C2").name == "Balance");
  CHECK(node_by_label(g, "C2").sub_role == NodeSubRole::Variable);
  CHECK(node_by_label(g, "C2").acc_flag == AccFlag::NotApplicable);
  CHECK(node_by_label(g, "C3").name == "call.value");
  CHECK(node_by_label(g, "C3").caller_class == CallerClass::SelfContract);
  CHECK(node_by_label(g, "N1").name == "amount");
  CHECK(node_by_label(g, "F").role == NodeRole::Fallback);
  CHECK(node_by_label(g, "F").sub_role == NodeSubRole::FallbackFn);
}

TEST_CASE("Fig.3 withdraw: the balance statement yields the AC self-edge then "
          "the AG edge to amount") {
  auto g = build_graph(fig3_withdraw(), VulnerabilityKind::Reentrancy);
  const int c2 = node_by_label(g, "C2").id;
  const int n1 = node_by_label(g, "N1").id;

  const GraphEdge* ac_self = nullptr;
  const GraphEdge* ag = nullptr;
  for (const auto& e : g.edges) {
    if (e.etype == EdgeType::AC && e.start == c2 && e.end == c2) ac_self = &e;
    if (e.etype == EdgeType::AG && e.start == c2 && e.end == n1) ag = &e;
  }
  REQUIRE(ac_self != nullptr);
  REQUIRE(ag != nullptr);
  CHECK(ag->order == ac_self->order + 1);  // access then assign
}

TEST_CASE("Fig.3 withdraw: fallback edges wrap the first call.value") {
  auto g = build_graph(fig3_withdraw(), VulnerabilityKind::Reentrancy);
  const int c1 = node_by_label(g, "C1").id;
  const int c3 = node_by_label(g, "C3").id;
  const int f = node_by_label(g, "F").id;

  std::vector<const GraphEdge*> fb;
  for (const auto& e : g.edges)
    if (e.etype == EdgeType::FB) fb.push_back(&e);
  REQUIRE(fb.size() == 2);
  CHECK(fb[0]->start == c3);
  CHECK(fb[0]->end == f);
  CHECK(fb[1]->start == f);
  CHECK(fb[1]->end == c1);
}

TEST_CASE("exactly two FB edges regardless of how many call.values exist") {
  const char* src = R"(
contract Multi {
    function f(uint a) public {
        msg.sender.call.value(a)();
        msg.sender.call.value(a + 1)();
        msg.sender.call.value(a + 2)();
    }
}
)";
  auto g = build_graph(parse_fn(src, "f"), VulnerabilityKind::Reentrancy);
  int fb = 0;
  for (const auto& e : g.edges) fb += e.etype == EdgeType::FB;
  CHECK(fb == 2);
}

TEST_CASE("timestamp roles: assignment target and invocation are core") {
  auto fn = parse_fn(
      "contract T { function f() public { uint t = block.timestamp; } }", "f");
  auto nodes = assign_roles(fn, VulnerabilityKind::TimestampDependence);
  std::map<std::string, NodeRole> roles;
  for (const auto& n : nodes) roles[n.name] = n.role;
  CHECK(roles.at("t") == NodeRole::Core);
  CHECK(roles.at("block.timestamp") == NodeRole::Core);
  CHECK(roles.at("f") == NodeRole::Normal);  // the function node stays auxiliary
  for (const auto& n : nodes) CHECK(n.role != NodeRole::Fallback);
}

TEST_CASE("reentrancy roles: plain assignment yields one normal node only") {
  auto fn = parse_fn("contract T { function f() public { uint x; x = 1; } }", "f");
  auto nodes = assign_roles(fn, VulnerabilityKind::Reentrancy);
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].role == NodeRole::Normal);
  CHECK(nodes[0].sub_role == NodeSubRole::Variable);
  CHECK(nodes[0].name == "x");
}

TEST_CASE("bare return builds an edgeless graph") {
  auto fn = parse_fn("contract T { function f() public { return; } }", "f");
  auto g = build_graph(fn, VulnerabilityKind::Reentrancy);
  CHECK(g.edges.empty());
}

TEST_CASE("infinite-loop roles: loops, condition variables and self calls are core") {
  const char* src = R"(
contract L {
    uint x;
    function f(uint n) public {
        while (n > 0) {
            x += 1;
        }
        f(n);
    }
}
)";
  auto g = build_graph(parse_fn(src, "f"), VulnerabilityKind::InfiniteLoop);
  std::map<std::string, const GraphNode*> by_name;
  for (const auto& n : g.nodes) by_name[n.name] = &n;
  REQUIRE(by_name.count("while"));
  CHECK(by_name.at("while")->role == NodeRole::Core);
  CHECK(by_name.at("while")->sub_role == NodeSubRole::Invocation);
  CHECK(by_name.at("n")->role == NodeRole::Core);  // loop condition variable
  CHECK(by_name.at("f")->role == NodeRole::Core);  // self invocation site
  CHECK(by_name.at("x")->role == NodeRole::Normal);
  bool has_wh = false;
  for (const auto& e : g.edges) has_wh |= e.etype == EdgeType::WH;
  CHECK(has_wh);
}

TEST_CASE("temporal orders are contiguous and endpoints are valid") {
  auto cases = testsupport::pattern_cases();
  cases.push_back(testsupport::bank_withdraw_case());
  for (const auto& pc : cases) {
    CAPTURE(pc.name);
    auto parsed = parse_text(pc.source);
    auto fn = resolve_function(parsed.contracts[0], pc.function);
    for (auto kind :
         {VulnerabilityKind::Reentrancy, VulnerabilityKind::TimestampDependence,
          VulnerabilityKind::InfiniteLoop}) {
      auto g = build_graph(fn, kind);
      std::set<int> orders;
      for (const auto& e : g.edges) {
        orders.insert(e.order);
        CHECK(e.start >= 0);
        CHECK(e.start < static_cast<int>(g.nodes.size()));
        CHECK(e.end >= 0);
        CHECK(e.end < static_cast<int>(g.nodes.size()));
      }
      CHECK(orders.size() == g.edges.size());
      if (!g.edges.empty()) {
        CHECK(*orders.begin() == 1);
        CHECK(*orders.rbegin() == static_cast<int>(g.edges.size()));
      }

      // exactly one fallback node when the function moves money, else none
      const bool moves_money = pc.source.find("call.value") != std::string::npos ||
                               pc.source.find(".transfer(") != std::string::npos ||
                               pc.source.find(".send(") != std::string::npos;
      int fallbacks = 0;
      for (const auto& n : g.nodes) fallbacks += n.role == NodeRole::Fallback;
      CHECK(fallbacks == (moves_money ? 1 : 0));
    }
  }
}

TEST_CASE("building the same function twice dumps identical JSON") {
  auto fn = fig3_withdraw();
  auto a = to_json(build_graph(fn, VulnerabilityKind::Reentrancy));
  auto b = to_json(build_graph(fn, VulnerabilityKind::Reentrancy));
  CHECK(a == b);
  CHECK(a.find("\"kind\":\"reentrancy\"") != std::string::npos);
  CHECK(a.find("\"function\":\"withdraw\"") != std::string::npos);
}

TEST_CASE("assignment to an unresolved identifier fails the build") {
  auto fn = parse_fn("contract T { function f() public { ghost = 1; } }", "f");
  CHECK_THROWS_AS(build_graph(fn, VulnerabilityKind::Reentrancy), GraphBuildError);
}

TEST_CASE("encode_edge_type: one-hot positions follow the table order") {
  auto fw = encode_edge_type(EdgeType::FW);
  auto ag = encode_edge_type(EdgeType::AG);
  auto fb = encode_edge_type(EdgeType::FB);
  CHECK(fw[9] == 1.0);
  CHECK(ag[10] == 1.0);
  CHECK(fb[12] == 1.0);
  for (auto t : {EdgeType::AH, EdgeType::RG, EdgeType::IR, EdgeType::IT,
                 EdgeType::IF, EdgeType::GB, EdgeType::GN, EdgeType::WH,
                 EdgeType::FR, EdgeType::FW, EdgeType::AG, EdgeType::AC,
                 EdgeType::FB}) {
    auto v = encode_edge_type(t);
    double sum = 0;
    for (double x : v) sum += x;
    CHECK(sum == 1.0);
    CHECK(v[static_cast<size_t>(t)] == 1.0);
  }
}

TEST_CASE("node features: fallback row encodes NotApplicable and role (0,0,1)") {
  auto g = build_graph(fig3_withdraw(), VulnerabilityKind::Reentrancy);
  NodeFeatureOptions opt;
  auto rows = encode_node_features(g, 24, opt);
  REQUIRE(rows.size() == g.nodes.size());

  const auto& f = node_by_label(g, "F");
  const auto& row = rows[static_cast<size_t>(f.id)];
  const int B = opt.buckets;
  // acc one-hot: NotApplicable is the third slot
  CHECK(row[static_cast<size_t>(B + 2)] == 1.0);
  // caller one-hot: NotApplicable is the fourth slot
  CHECK(row[static_cast<size_t>(B + 3 + 3)] == 1.0);
  // role one-hot: (0,0,1)
  CHECK(row[static_cast<size_t>(B + 3 + 4 + 0)] == 0.0);
  CHECK(row[static_cast<size_t>(B + 3 + 4 + 1)] == 0.0);
  CHECK(row[static_cast<size_t>(B + 3 + 4 + 2)] == 1.0);
  // zero padding beyond the encoded width
  for (size_t i = static_cast<size_t>(B + 13); i < row.size(); ++i)
    CHECK(row[i] == 0.0);

  // C3 carries the SelfContract caller class
  const auto& c3_row = rows[static_cast<size_t>(node_by_label(g, "C3").id)];
  CHECK(c3_row[static_cast<size_t>(B + 3 + 0)] == 1.0);
}

TEST_CASE("node features: identical flags, different identifiers differ only "
          "in the bucket block") {
  auto fn = parse_fn(
      "contract T { function f() public { uint alpha = 1; uint beta = 2; } }",
      "f");
  auto g = build_graph(fn, VulnerabilityKind::Reentrancy);
  REQUIRE(g.nodes.size() == 2);
  NodeFeatureOptions opt;
  auto rows = encode_node_features(g, 24, opt);
  const int B = opt.buckets;
  bool bucket_differs = false;
  for (int i = 0; i < B; ++i)
    bucket_differs |=
        rows[0][static_cast<size_t>(i)] != rows[1][static_cast<size_t>(i)];
  CHECK(bucket_differs);
  for (size_t i = static_cast<size_t>(B); i < rows[0].size(); ++i)
    CHECK(rows[0][i] == rows[1][i]);
}

TEST_CASE("node features: dim below the encodable width is rejected") {
  auto g = build_graph(fig3_withdraw(), VulnerabilityKind::Reentrancy);
  CHECK_THROWS_AS(encode_node_features(g, 16), DimensionError);
  CHECK_NOTHROW(encode_node_features(g, 21));
}
