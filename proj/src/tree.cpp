#include "gpfuse/tree.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gpfuse/morph.hpp"

namespace gpfuse {

namespace {

const char* symbol_name(OpKind op) {
    switch (op) {
        case OpKind::Erode: return "ERO";
        case OpKind::Dilate: return "DIL";
        case OpKind::Median: return "MF";
        case OpKind::Or: return "OR";
        case OpKind::And: return "AND";
        case OpKind::Majority: return "MV";
        case OpKind::Terminal: break;
    }
    return "?";
}

void check_arity(const TreeNode& node) {
    const std::size_t n = node.children.size();
    switch (node.op) {
        case OpKind::Terminal:
            if (n != 0) throw std::invalid_argument("terminal node must have no children");
            return;
        case OpKind::Erode:
        case OpKind::Dilate:
        case OpKind::Median:
            if (n != 1)
                throw std::invalid_argument(std::string(symbol_name(node.op)) + " takes exactly 1 argument, got " +
                                            std::to_string(n));
            return;
        case OpKind::Or:
        case OpKind::And:
            if (n != 2)
                throw std::invalid_argument(std::string(symbol_name(node.op)) + " takes exactly 2 arguments, got " +
                                            std::to_string(n));
            return;
        case OpKind::Majority:
            if (n < 3 || n % 2 == 0)
                throw std::invalid_argument("MV takes an odd number >= 3 of arguments, got " + std::to_string(n));
            return;
    }
}

void validate_node(const TreeNode& node, int n_terminals) {
    check_arity(node);
    if (node.op == OpKind::Terminal) {
        if (node.terminal < 0 || node.terminal >= n_terminals)
            throw std::invalid_argument("terminal index A" + std::to_string(node.terminal) +
                                        " out of range for pool size " + std::to_string(n_terminals));
    }
    for (const TreeNode& c : node.children) validate_node(c, n_terminals);
}

BinaryMask eval_node(const TreeNode& node, std::span<const BinaryMask> inputs) {
    switch (node.op) {
        case OpKind::Terminal:
            if (node.terminal < 0 || static_cast<std::size_t>(node.terminal) >= inputs.size())
                throw std::invalid_argument("terminal index A" + std::to_string(node.terminal) +
                                            " out of range for " + std::to_string(inputs.size()) + " inputs");
            return inputs[node.terminal];
        case OpKind::Erode: return erode(eval_node(node.children[0], inputs));
        case OpKind::Dilate: return dilate(eval_node(node.children[0], inputs));
        case OpKind::Median: return median5(eval_node(node.children[0], inputs));
        case OpKind::Or: return mask_or(eval_node(node.children[0], inputs), eval_node(node.children[1], inputs));
        case OpKind::And: return mask_and(eval_node(node.children[0], inputs), eval_node(node.children[1], inputs));
        case OpKind::Majority: {
            std::vector<BinaryMask> args;
            args.reserve(node.children.size());
            for (const TreeNode& c : node.children) args.push_back(eval_node(c, inputs));
            return majority(args);
        }
    }
    throw std::logic_error("unreachable node kind");
}

void serialize_node(const TreeNode& node, std::string& out) {
    if (node.op == OpKind::Terminal) {
        out += 'A';
        out += std::to_string(node.terminal);
        return;
    }
    out += '(';
    out += symbol_name(node.op);
    for (const TreeNode& c : node.children) {
        out += ' ';
        serialize_node(c, out);
    }
    out += ')';
}

void collect_stats(const TreeNode& node, int depth, TreeStats& s, std::set<int>& terminals) {
    ++s.size;
    s.depth = std::max(s.depth, depth);
    if (node.op == OpKind::Terminal) terminals.insert(node.terminal);
    for (const TreeNode& c : node.children) collect_stats(c, depth + 1, s, terminals);
}

// --- parsing -------------------------------------------------------------

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size()) {
            if (text[pos] == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string next_atom() {
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
               text[pos] != ')')
            ++pos;
        return text.substr(start, pos - start);
    }

    TreeNode parse_terminal(const std::string& atom) {
        if (atom.size() < 2 || atom[0] != 'A')
            throw std::invalid_argument("unknown symbol '" + atom + "'");
        for (std::size_t i = 1; i < atom.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(atom[i])))
                throw std::invalid_argument("unknown symbol '" + atom + "'");
        TreeNode node;
        node.terminal = std::stoi(atom.substr(1));
        return node;
    }

    TreeNode parse_node() {
        skip_ws();
        if (pos >= text.size()) throw std::invalid_argument("unexpected end of input");
        if (text[pos] != '(') return parse_terminal(next_atom());
        ++pos;  // consume '('
        skip_ws();
        std::string sym = next_atom();
        TreeNode node;
        if (sym == "ERO") node.op = OpKind::Erode;
        else if (sym == "DIL") node.op = OpKind::Dilate;
        else if (sym == "MF") node.op = OpKind::Median;
        else if (sym == "OR") node.op = OpKind::Or;
        else if (sym == "AND") node.op = OpKind::And;
        else if (sym == "MV") node.op = OpKind::Majority;
        else throw std::invalid_argument("unknown symbol '" + sym + "'");
        for (;;) {
            skip_ws();
            if (pos >= text.size()) throw std::invalid_argument("unbalanced parentheses");
            if (text[pos] == ')') {
                ++pos;
                break;
            }
            node.children.push_back(parse_node());
        }
        check_arity(node);
        return node;
    }
};

}  // namespace

void validate(const SolutionTree& tree, int n_terminals) { validate_node(tree.root, n_terminals); }

BinaryMask evaluate(const SolutionTree& tree, std::span<const BinaryMask> inputs) {
    if (inputs.empty()) throw std::invalid_argument("evaluate: no input masks");
    for (std::size_t i = 1; i < inputs.size(); ++i)
        if (!inputs[0].same_shape(inputs[i]))
            throw std::invalid_argument("evaluate: input mask dimensions disagree");
    return eval_node(tree.root, inputs);
}

std::string serialize(const SolutionTree& tree) {
    std::string out;
    serialize_node(tree.root, out);
    return out;
}

SolutionTree parse(const std::string& text) {
    Parser p{text};
    SolutionTree tree;
    tree.root = p.parse_node();
    p.skip_ws();
    if (p.pos != text.size()) throw std::invalid_argument("trailing input after tree expression");
    return tree;
}

TreeStats stats(const SolutionTree& tree) {
    TreeStats s;
    std::set<int> terminals;
    collect_stats(tree.root, 0, s, terminals);
    s.distinct_terminals = static_cast<int>(terminals.size());
    return s;
}

SolutionTree load_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open tree file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void save_tree(const SolutionTree& tree, const std::filesystem::path& path,
               std::span<const std::string> terminal_names) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open destination for writing");
    for (std::size_t i = 0; i < terminal_names.size(); ++i)
        out << "# A" << i << " = " << terminal_names[i] << "\n";
    out << serialize(tree) << "\n";
}

}  // namespace gpfuse
