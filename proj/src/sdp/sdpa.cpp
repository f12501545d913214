#include "lmival/sdp/sdpa.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace lmival::sdp {

namespace {

// Shortest representation that reads back to the same double.
std::string num(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string num(long v) { return std::to_string(v); }

constexpr std::string_view offset_tag = "objective offset c0 = ";

using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

}  // namespace

std::string SdpaDocument::to_text() const
{
    std::ostringstream os;
    for (auto const& c : comments)
        os << '"' << c << '\n';
    os << m << '\n' << block_sizes.size() << '\n';
    for (std::size_t k = 0; k < block_sizes.size(); ++k)
        os << (k ? " " : "") << num(block_sizes[k]);
    os << '\n';
    for (std::size_t k = 0; k < c.size(); ++k)
        os << (k ? " " : "") << num(c[k]);
    os << '\n';
    for (auto const& e : entries)
        os << e.matno << ' ' << e.block << ' ' << e.i << ' ' << e.j << ' ' << num(e.value) << '\n';
    return os.str();
}

SdpaDocument to_sdpa(SDProblem const& p)
{
    if (p.c.size() != p.num_vars)
        throw std::invalid_argument("objective length does not match the variable count");

    SdpaDocument doc;
    doc.m = p.num_vars;
    doc.c = p.c;
    doc.offset = p.c0;
    doc.comments = {
        "lmival SDP export",
        "minimize sum_i c_i x_i + c0 subject to sum_i F_i x_i - F_0 >= 0",
        "x is the moment vector in the solver's internal minimization form",
        std::string(offset_tag) + num(p.c0),
    };

    std::map<Key, double> acc;
    auto put = [&](std::size_t matno, std::size_t blk, std::size_t i, std::size_t j, double v) {
        if (v == 0.0)
            return;
        if (i > j)
            std::swap(i, j);
        acc[{matno, blk, i, j}] += v;
    };

    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        auto const& B = p.blocks[b];
        std::size_t const blk = b + 1;
        doc.block_sizes.push_back(static_cast<long>(B.reduced_side()));
        if (!B.reduction) {
            for (auto const& e : B.entries)
                put(e.var + 1, blk, e.row + 1, e.col + 1, e.coef);
            continue;
        }
        auto const& Z = *B.reduction;
        std::map<std::size_t, Eigen::MatrixXd> per_var;
        for (auto const& e : B.entries) {
            auto [it, fresh] = per_var.try_emplace(e.var);
            if (fresh)
                it->second = Eigen::MatrixXd::Zero(B.side, B.side);
            it->second(e.row, e.col) += e.coef;
            if (e.row != e.col)
                it->second(e.col, e.row) += e.coef;
        }
        for (auto const& [var, F] : per_var) {
            Eigen::MatrixXd const R = Z.transpose() * F * Z;
            for (Eigen::Index i = 0; i < R.rows(); ++i)
                for (Eigen::Index j = i; j < R.cols(); ++j)
                    put(var + 1, blk, i + 1, j + 1, R(i, j));
        }
    }

    if (!p.equalities.empty()) {
        std::size_t const blk = p.blocks.size() + 1;
        doc.block_sizes.push_back(-2 * static_cast<long>(p.equalities.size()));
        for (std::size_t k = 0; k < p.equalities.size(); ++k) {
            auto const& row = p.equalities[k];
            std::size_t const up = 2 * k + 1, down = 2 * k + 2;
            for (auto const& [var, a] : row.entries) {
                put(var + 1, blk, up, up, a);
                put(var + 1, blk, down, down, -a);
            }
            put(0, blk, up, up, row.rhs);
            put(0, blk, down, down, -row.rhs);
        }
    }

    doc.entries.reserve(acc.size());
    for (auto const& [k, v] : acc)
        if (v != 0.0)
            doc.entries.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), v});
    return doc;
}

std::string export_sdpa(SDProblem const& p) { return to_sdpa(p).to_text(); }

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

template <class V>
V parse_number(Token const& t, char const* what)
{
    V v{};
    auto const* first = t.text.data();
    auto const* last = first + t.text.size();
    if (*first == '+')
        ++first;
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr != last)
        throw SdpaParseError(t.line, std::string("expected ") + what + ", got '" + t.text + "'");
    return v;
}

}  // namespace

SdpaDocument parse_sdpa(std::string_view text)
{
    SdpaDocument doc;
    std::vector<Token> tokens;

    std::size_t line_no = 0;
    bool in_header = true;
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::vector<Token>> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
            if (in_header) {
                std::string body = line.substr(1);
                if (body.rfind(offset_tag, 0) == 0) {
                    Token t{body.substr(offset_tag.size()), line_no};
                    doc.offset = parse_number<double>(t, "objective offset");
                }
                doc.comments.push_back(std::move(body));
            }
            continue;
        }
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')')
                ch = ' ';
        std::istringstream ls(line);
        std::vector<Token> row;
        for (std::string w; ls >> w;)
            row.push_back({w, line_no});
        if (row.empty())
            continue;
        in_header = false;
        lines.push_back(std::move(row));
    }

    std::size_t li = 0;
    auto need_line = [&](char const* what) -> std::vector<Token> const& {
        if (li >= lines.size())
            throw SdpaParseError(line_no, std::string("missing ") + what);
        return lines[li++];
    };

    // m and nblocks: first token of their lines, trailing text ignored.
    doc.m = parse_number<std::size_t>(need_line("constraint count").front(), "constraint count");
    auto const nblocks =
        parse_number<std::size_t>(need_line("block count").front(), "block count");

    for (auto const& t : need_line("block sizes")) {
        if (doc.block_sizes.size() == nblocks)
            break;
        auto const s = parse_number<long>(t, "block size");
        if (s == 0)
            throw SdpaParseError(t.line, "block size 0");
        doc.block_sizes.push_back(s);
    }
    if (doc.block_sizes.size() != nblocks)
        throw SdpaParseError(line_no, "expected " + std::to_string(nblocks) + " block sizes");

    for (std::size_t k = li; k < lines.size(); ++k)
        for (auto& t : lines[k])
            tokens.push_back(std::move(t));
    std::size_t ti = 0;
    for (std::size_t k = 0; k < doc.m; ++k) {
        if (ti >= tokens.size())
            throw SdpaParseError(line_no, "objective vector is short");
        doc.c.push_back(parse_number<double>(tokens[ti++], "objective coefficient"));
    }

    if ((tokens.size() - ti) % 5 != 0)
        throw SdpaParseError(tokens.back().line, "incomplete matrix entry");
    for (; ti < tokens.size(); ti += 5) {
        SdpaDocument::Entry e{};
        e.matno = parse_number<std::size_t>(tokens[ti], "matrix number");
        e.block = parse_number<std::size_t>(tokens[ti + 1], "block number");
        e.i = parse_number<std::size_t>(tokens[ti + 2], "row index");
        e.j = parse_number<std::size_t>(tokens[ti + 3], "column index");
        e.value = parse_number<double>(tokens[ti + 4], "entry value");
        auto const line_of = tokens[ti].line;
        if (e.matno > doc.m)
            throw SdpaParseError(line_of, "matrix number exceeds m");
        if (e.block < 1 || e.block > nblocks)
            throw SdpaParseError(line_of, "block number out of range");
        auto const size = static_cast<std::size_t>(std::labs(doc.block_sizes[e.block - 1]));
        if (e.i < 1 || e.j < 1 || e.i > size || e.j > size)
            throw SdpaParseError(line_of, "entry index outside its block");
        if (doc.block_sizes[e.block - 1] < 0 && e.i != e.j)
            throw SdpaParseError(line_of, "off-diagonal entry in a diagonal block");
        if (e.i > e.j)
            std::swap(e.i, e.j);
        doc.entries.push_back(e);
    }
    return doc;
}

SDProblem from_sdpa(SdpaDocument const& doc)
{
    SDProblem p;
    p.num_vars = doc.m;
    p.c = doc.c;
    p.c0 = doc.offset;

    // Gather per block; std::map keeps (matno, i, j) ordering stable.
    std::vector<std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double>> per_block(
        doc.block_sizes.size());
    for (auto const& e : doc.entries)
        per_block[e.block - 1][{e.matno, e.i, e.j}] += e.value;

    std::optional<std::size_t> one;  // variable pinned to 1, for constants
    auto constant_var = [&]() {
        if (!one) {
            one = p.num_vars++;
            p.c.push_back(0.0);
        }
        return *one;
    };

    for (std::size_t b = 0; b < doc.block_sizes.size(); ++b) {
        long const size = doc.block_sizes[b];
        auto const& E = per_block[b];
        if (size > 0) {
            relaxation::PSDBlock B;
            B.label = "block " + std::to_string(b + 1);
            B.side = static_cast<std::size_t>(size);
            for (auto const& [k, v] : E) {
                auto [matno, i, j] = k;
                if (matno == 0)
                    B.entries.push_back({i - 1, j - 1, constant_var(), -v});
                else
                    B.entries.push_back({i - 1, j - 1, matno - 1, v});
            }
            p.blocks.push_back(std::move(B));
            continue;
        }

        // Diagonal block: rows[i] = (F_0 value, coefficients by variable).
        std::size_t const n = static_cast<std::size_t>(-size);
        std::vector<std::map<std::size_t, double>> rows(n);
        std::vector<double> rhs(n, 0.0);
        for (auto const& [k, v] : E) {
            auto [matno, i, j] = k;
            if (matno == 0)
                rhs[i - 1] += v;
            else
                rows[i - 1][matno - 1] += v;
        }
        auto negated = [&](std::size_t a, std::size_t b2) {
            if (rhs[a] != -rhs[b2] || rows[a].size() != rows[b2].size())
                return false;
            for (auto const& [var, v] : rows[a]) {
                auto it = rows[b2].find(var);
                if (it == rows[b2].end() || it->second != -v)
                    return false;
            }
            return true;
        };
        for (std::size_t i = 0; i < n;) {
            if (i + 1 < n && negated(i, i + 1)) {
                relaxation::SparseRow r;
                r.entries.assign(rows[i].begin(), rows[i].end());
                r.rhs = rhs[i];
                r.label = "row " + std::to_string(p.equalities.size() + 1);
                p.equalities.push_back(std::move(r));
                i += 2;
                continue;
            }
            relaxation::PSDBlock B;
            B.label = "lp " + std::to_string(b + 1) + "." + std::to_string(i + 1);
            B.side = 1;
            for (auto const& [var, v] : rows[i])
                B.entries.push_back({0, 0, var, v});
            if (rhs[i] != 0.0)
                B.entries.push_back({0, 0, constant_var(), -rhs[i]});
            p.blocks.push_back(std::move(B));
            ++i;
        }
    }
    if (one)
        p.equalities.push_back({{{*one, 1.0}}, 1.0, "constant"});
    return p;
}

}  // namespace lmival::sdp
