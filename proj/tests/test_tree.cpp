#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gpfuse/morph.hpp"
#include "gpfuse/tree.hpp"

using namespace gpfuse;
namespace fs = std::filesystem;

namespace {

TreeNode term(int k) {
    TreeNode n;
    n.op = OpKind::Terminal;
    n.terminal = k;
    return n;
}

TreeNode node(OpKind op, std::vector<TreeNode> children) {
    TreeNode n;
    n.op = op;
    n.children = std::move(children);
    return n;
}

SolutionTree random_tree(std::mt19937_64& rng, int depth, int n_terminals) {
    struct Builder {
        std::mt19937_64& rng;
        int n_terminals;
        TreeNode build(int depth) {
            if (depth == 0 || rng() % 3 == 0) return term(static_cast<int>(rng() % n_terminals));
            switch (rng() % 6) {
                case 0: return node(OpKind::Erode, {build(depth - 1)});
                case 1: return node(OpKind::Dilate, {build(depth - 1)});
                case 2: return node(OpKind::Median, {build(depth - 1)});
                case 3: return node(OpKind::Or, {build(depth - 1), build(depth - 1)});
                case 4: return node(OpKind::And, {build(depth - 1), build(depth - 1)});
                default: return node(OpKind::Majority, {build(depth - 1), build(depth - 1), build(depth - 1)});
            }
        }
    } b{rng, n_terminals};
    return SolutionTree{b.build(depth)};
}

}  // namespace

TEST_CASE("serialize produces the canonical form") {
    SolutionTree t{node(OpKind::Median, {node(OpKind::Majority, {term(0), term(1), term(2)})})};
    CHECK(serialize(t) == "(MF (MV A0 A1 A2))");
    CHECK(serialize(SolutionTree{term(7)}) == "A7");
    SolutionTree ops{node(OpKind::Or, {node(OpKind::And, {term(0), node(OpKind::Erode, {term(1)})}),
                                       node(OpKind::Dilate, {term(2)})})};
    CHECK(serialize(ops) == "(OR (AND A0 (ERO A1)) (DIL A2))");
}

TEST_CASE("parse inverts serialize on random trees") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        SolutionTree t = random_tree(rng, 1 + static_cast<int>(rng() % 5), 6);
        CHECK(parse(serialize(t)) == t);
    }
}

TEST_CASE("parse accepts whitespace and comment lines") {
    SolutionTree t = parse("# best of run\n  ( MF\n\t(MV A0 A1 A2) )\n# trailing note\n");
    CHECK(serialize(t) == "(MF (MV A0 A1 A2))");
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(parse("(XYZ A0)"), std::invalid_argument);          // unknown symbol
    CHECK_THROWS_AS(parse("(MF A0 A1)"), std::invalid_argument);        // arity
    CHECK_THROWS_AS(parse("(OR A0)"), std::invalid_argument);           // arity
    CHECK_THROWS_AS(parse("(MV A0 A1)"), std::invalid_argument);        // even MV
    CHECK_THROWS_AS(parse("(MV A0)"), std::invalid_argument);           // MV arity < 3
    CHECK_THROWS_AS(parse("(OR A0 A1"), std::invalid_argument);         // unbalanced
    CHECK_THROWS_AS(parse("(OR A0 A1))"), std::invalid_argument);       // trailing
    CHECK_THROWS_AS(parse(""), std::invalid_argument);                  // empty
    CHECK_THROWS_AS(parse("A0 A1"), std::invalid_argument);             // two roots
    CHECK_THROWS_AS(parse("(OR A0 MV)"), std::invalid_argument);        // operator as leaf
    CHECK_THROWS_AS(parse("Ax"), std::invalid_argument);                // bad terminal token
}

TEST_CASE("validate enforces arity and terminal range") {
    SolutionTree ok{node(OpKind::Majority, {term(0), term(1), term(2)})};
    CHECK_NOTHROW(validate(ok, 3));
    CHECK_THROWS_AS(validate(ok, 2), std::invalid_argument);  // A2 out of range

    SolutionTree bad_arity{node(OpKind::Or, {term(0)})};
    CHECK_THROWS_AS(validate(bad_arity, 3), std::invalid_argument);
    SolutionTree even_mv{node(OpKind::Majority, {term(0), term(1), term(2), term(0)})};
    CHECK_THROWS_AS(validate(even_mv, 3), std::invalid_argument);
    SolutionTree neg{term(-1)};
    CHECK_THROWS_AS(validate(neg, 3), std::invalid_argument);
    SolutionTree term_kids{term(0)};
    term_kids.root.children.push_back(term(1));
    CHECK_THROWS_AS(validate(term_kids, 3), std::invalid_argument);
}

TEST_CASE("stats: depth, size and distinct terminals") {
    CHECK(stats(SolutionTree{term(0)}).depth == 0);
    CHECK(stats(SolutionTree{term(0)}).size == 1);

    SolutionTree t{node(OpKind::Median, {node(OpKind::Majority, {term(0), term(1), term(0)})})};
    TreeStats s = stats(t);
    CHECK(s.depth == 2);
    CHECK(s.size == 5);
    CHECK(s.distinct_terminals == 2);
}

TEST_CASE("evaluate composes the fusion operators bottom-up") {
    std::mt19937_64 rng(13);
    std::vector<BinaryMask> inputs;
    for (int k = 0; k < 3; ++k) {
        BinaryMask m(8, 7);
        for (auto& p : m.data) p = rng() % 2;
        inputs.push_back(std::move(m));
    }

    CHECK(evaluate(SolutionTree{term(2)}, inputs) == inputs[2]);

    SolutionTree t{node(OpKind::Median,
                        {node(OpKind::Or, {node(OpKind::Erode, {term(0)}),
                                           node(OpKind::And, {term(1), node(OpKind::Dilate, {term(2)})})})})};
    BinaryMask expected = median5(mask_or(erode(inputs[0]), mask_and(inputs[1], dilate(inputs[2]))));
    CHECK(evaluate(t, inputs) == expected);

    SolutionTree mv{node(OpKind::Majority, {term(0), term(1), term(2)})};
    std::vector<BinaryMask> three = {inputs[0], inputs[1], inputs[2]};
    CHECK(evaluate(mv, inputs) == majority(three));
}

TEST_CASE("evaluate of a deep chain agrees with iterated application") {
    BinaryMask m(9, 9);
    for (int r = 2; r <= 6; ++r)
        for (int c = 2; c <= 6; ++c) m.at(r, c) = 1;
    std::vector<BinaryMask> inputs = {m};

    SolutionTree chain{node(OpKind::Dilate, {node(OpKind::Dilate, {node(OpKind::Erode, {term(0)})})})};
    CHECK(evaluate(chain, inputs) == dilate(dilate(erode(m))));
}

TEST_CASE("save/load round trip with terminal-name comments") {
    fs::path dir = fs::temp_directory_path() / "gpfuse_tree_test";
    fs::create_directories(dir);
    SolutionTree t{node(OpKind::Or, {term(0), node(OpKind::Erode, {term(1)})})};
    std::vector<std::string> names = {"framediff", "medianbg"};
    save_tree(t, dir / "t.txt", names);
    CHECK(load_tree(dir / "t.txt") == t);

    std::ifstream in(dir / "t.txt");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("# A0 = framediff") != std::string::npos);
    CHECK(text.find("# A1 = medianbg") != std::string::npos);

    CHECK_THROWS_AS(load_tree(dir / "missing.txt"), std::runtime_error);
}
