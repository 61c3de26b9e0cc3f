#include "bebsim/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bebsim/errors.hpp"

namespace bebsim {

namespace fs = std::filesystem;

std::string fmt_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("io: cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.good())
            throw IoError("io: write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw IoError("io: cannot move '" + tmp.string() + "' to '" + target.string() + "': " +
                      ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("io: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string passengers_to_csv(const PassengerSet& set) {
    std::string out = "id,arrival_minute,origin,direction,destination\n";
    for (const Passenger& p : set.passengers) {
        out += std::to_string(p.id);
        out += ',';
        out += std::to_string(p.arrival_minute);
        out += ',';
        out += std::to_string(p.origin);
        out += ',';
        out += p.direction == Direction::Up ? "up" : "down";
        out += ',';
        out += std::to_string(p.destination);
        out += '\n';
    }
    return out;
}

PassengerSet passengers_from_csv(const std::string& text) {
    PassengerSet set;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "id,arrival_minute,origin,direction,destination")
        throw ValidationError("passengers csv: missing or unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Passenger p;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        p.id = std::stoll(field);
        std::getline(row, field, ',');
        p.arrival_minute = std::stoi(field);
        std::getline(row, field, ',');
        p.origin = std::stoi(field);
        std::getline(row, field, ',');
        if (field != "up" && field != "down")
            throw ValidationError("passengers csv: direction must be 'up' or 'down'");
        p.direction = field == "up" ? Direction::Up : Direction::Down;
        if (!std::getline(row, field, ','))
            throw ValidationError("passengers csv: truncated row");
        p.destination = std::stoi(field);
        set.passengers.push_back(p);
    }
    return set;
}

} // namespace bebsim
