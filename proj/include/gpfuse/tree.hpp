#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gpfuse/mask.hpp"

namespace gpfuse {

// Node kinds of a fusion tree. Terminals index into the pool of input
// algorithms; internal nodes apply one of the six fusion operators.
enum class OpKind {
    Terminal,
    Erode,     // ERO, arity 1
    Dilate,    // DIL, arity 1
    Median,    // MF,  arity 1
    Or,        // OR,  arity 2
    And,       // AND, arity 2
    Majority,  // MV,  odd arity >= 3
};

struct TreeNode {
    OpKind op = OpKind::Terminal;
    int terminal = 0;  // meaningful only for OpKind::Terminal
    std::vector<TreeNode> children;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct SolutionTree {
    TreeNode root;

    friend bool operator==(const SolutionTree&, const SolutionTree&) = default;
};

struct TreeStats {
    int depth = 0;  // bare terminal has depth 0
    int size = 0;   // node count
    int distinct_terminals = 0;
};

// Throws std::invalid_argument on arity violations or terminal indices >= n_terminals.
void validate(const SolutionTree& tree, int n_terminals);

// Bottom-up application of the fusion operators to the input masks.
// Terminal k yields inputs[k].
BinaryMask evaluate(const SolutionTree& tree, std::span<const BinaryMask> inputs);

// Canonical s-expression, e.g. "(MF (MV A0 A1 A2))".
std::string serialize(const SolutionTree& tree);

// Inverse of serialize. Accepts arbitrary whitespace; lines starting with '#'
// are comments. Throws std::invalid_argument on malformed input.
SolutionTree parse(const std::string& text);

TreeStats stats(const SolutionTree& tree);

SolutionTree load_tree(const std::filesystem::path& path);

// Writes the canonical s-expression, preceded by '#' comment lines mapping
// terminal tokens to algorithm names when provided.
void save_tree(const SolutionTree& tree, const std::filesystem::path& path,
               std::span<const std::string> terminal_names = {});

}  // namespace gpfuse
