#include "lshmodel/errors.hpp"
#include "lshmodel/grid_lsh.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lshmodel::lsh {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    if (field.empty())
        return false;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

} // namespace

LoadedPoints parse_csv(std::string_view text) {
    LoadedPoints out;
    std::vector<double> coords;
    std::size_t dim = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool first_content = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty())
            continue;

        const auto fields = split(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size() && numeric; ++k)
            numeric = parse_double(fields[k], values[k]);

        if (first_content) {
            first_content = false;
            if (!numeric)
                continue; // header line
        }
        if (!numeric)
            throw ParseError(line_no, "non-numeric field");
        if (dim == 0)
            dim = fields.size();
        else if (fields.size() != dim)
            throw ParseError(line_no, "expected " + std::to_string(dim) + " fields, found " +
                                          std::to_string(fields.size()));
        for (double x : values) {
            if (!std::isfinite(x))
                throw ParseError(line_no, "non-finite value");
            if (x < 0.0 || x >= 1.0) {
                ++out.wrapped_values;
                x -= std::floor(x);
                if (x >= 1.0)
                    x = 0.0;
            }
            coords.push_back(x);
        }
        ++rows;
    }
    if (rows == 0)
        throw ParseError(line_no == 0 ? 1 : line_no, "no data rows");
    out.points = PointSet(rows, dim, std::move(coords));
    return out;
}

LoadedPoints load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(0, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

} // namespace lshmodel::lsh
