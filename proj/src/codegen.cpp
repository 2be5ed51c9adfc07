#include "resttsl/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "resttsl/errors.hpp"

namespace resttsl::codegen {

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool word_boundary_before(const std::string& text, size_t pos) {
    return pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
}

std::string sanitize_filename(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
            out += c;
        } else {
            out += '_';
        }
    }
    return out.empty() ? "untagged" : out;
}

struct FencedBlock {
    std::string body;
};

std::vector<FencedBlock> find_fenced_blocks(const std::string& content,
                                            std::vector<std::string>& discards) {
    std::vector<FencedBlock> blocks;
    size_t pos = 0;
    while (true) {
        size_t start = content.find("```", pos);
        if (start == std::string::npos) break;
        size_t line_end = content.find('\n', start + 3);
        if (line_end == std::string::npos) {
            discards.push_back("unterminated code fence at end of completion");
            break;
        }
        size_t body_start = line_end + 1;
        size_t close = content.find("```", body_start);
        if (close == std::string::npos) {
            discards.push_back("code fence without a closing marker");
            break;
        }
        std::string body = content.substr(body_start, close - body_start);
        while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
        blocks.push_back({std::move(body)});
        pos = close + 3;
    }
    return blocks;
}

std::vector<std::string> split_chunks(const std::string& content) {
    std::vector<std::string> chunks;
    std::string current;
    std::istringstream in(content);
    std::string line;
    int blank_run = 0;
    while (std::getline(in, line)) {
        std::string trimmed = line;
        trimmed.erase(std::remove(trimmed.begin(), trimmed.end(), '\r'), trimmed.end());
        bool blank = trimmed.find_first_not_of(" \t") == std::string::npos;
        if (blank) {
            ++blank_run;
            if (blank_run >= 1 && !current.empty()) {
                chunks.push_back(current);
                current.clear();
            }
        } else {
            blank_run = 0;
            if (!current.empty()) current += '\n';
            current += line;
        }
    }
    if (!current.empty()) chunks.push_back(current);
    return chunks;
}

std::string detect_test_name(const std::string& content, const std::string& case_id) {
    size_t pos = 0;
    while ((pos = content.find(case_id, pos)) != std::string::npos) {
        if (!word_boundary_before(content, pos)) {
            pos += case_id.size();
            continue;
        }
        size_t end = pos + case_id.size();
        if (end < content.size() && std::isdigit(static_cast<unsigned char>(content[end]))) {
            pos = end;
            continue;
        }
        while (end < content.size() && ident_char(content[end])) ++end;
        return content.substr(pos, end - pos);
    }
    return case_id;
}

std::string replace_word(const std::string& text, const std::string& from, const std::string& to) {
    std::string out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t hit = text.find(from, pos);
        if (hit == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        bool left_ok = hit == 0 || !ident_char(text[hit - 1]);
        size_t after = hit + from.size();
        bool right_ok = after >= text.size() || !ident_char(text[after]);
        out.append(text, pos, hit - pos);
        if (left_ok && right_ok) {
            out += to;
        } else {
            out += from;
        }
        pos = after;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::UnknownFramework, "template file not readable: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

std::vector<std::string> case_ids_in_text(const std::string& text) {
    std::vector<std::string> ids;
    size_t pos = 0;
    while ((pos = text.find("TC", pos)) != std::string::npos) {
        if (!word_boundary_before(text, pos)) {
            pos += 2;
            continue;
        }
        size_t digits = pos + 2;
        size_t end = digits;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == digits) {
            pos += 2;
            continue;
        }
        std::string id = text.substr(pos, end - pos);
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        pos = end;
    }
    return ids;
}

std::string sanitize_identifier(const std::string& text) {
    std::string out;
    for (char c : text) {
        out += ident_char(c) ? c : '_';
    }
    if (out.empty()) out = "_";
    if (std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(out.begin(), '_');
    return out;
}

ExtractResult extract_test_code(const gateway::Completion& completion,
                                const prompt::Segment& segment) {
    ExtractResult result;
    const std::set<std::string> wanted(segment.case_ids.begin(), segment.case_ids.end());
    auto ids_of = [&](const std::string& text) {
        std::vector<std::string> ids;
        for (const std::string& id : case_ids_in_text(text)) {
            if (wanted.count(id) != 0) ids.push_back(id);
        }
        return ids;
    };
    std::vector<FencedBlock> blocks =
        find_fenced_blocks(completion.content, result.report.discarded_reasons);
    std::string file_base = sanitize_filename(segment.group);
    if (!blocks.empty()) {
        result.report.blocks_found = static_cast<int>(blocks.size());
        int index = 0;
        for (FencedBlock& block : blocks) {
            std::vector<std::string> ids = ids_of(block.body);
            if (ids.empty()) {
                result.report.discarded_reasons.push_back(
                    "fenced block without any expected case id");
                continue;
            }
            ++index;
            TestFile file;
            file.file_name = file_base + std::to_string(index) + ".tests";
            file.group = segment.group;
            file.content = std::move(block.body);
            file.case_ids = std::move(ids);
            result.files.push_back(std::move(file));
        }
        result.report.blocks_used = static_cast<int>(result.files.size());
    } else {
        // No fences: fall back to the largest prose-delimited chunk that
        // mentions an expected case id.
        std::vector<std::string> chunks = split_chunks(completion.content);
        std::vector<size_t> candidates;
        for (size_t i = 0; i < chunks.size(); ++i) {
            if (!ids_of(chunks[i]).empty()) candidates.push_back(i);
        }
        result.report.blocks_found = static_cast<int>(candidates.size());
        if (!candidates.empty()) {
            size_t best = candidates.front();
            for (size_t index : candidates) {
                if (chunks[index].size() > chunks[best].size()) best = index;
            }
            for (size_t index : candidates) {
                if (index != best) {
                    result.report.discarded_reasons.push_back(
                        "unfenced chunk superseded by a larger one");
                }
            }
            for (size_t i = 0; i < chunks.size(); ++i) {
                if (i != best && std::find(candidates.begin(), candidates.end(), i) ==
                                     candidates.end()) {
                    result.report.discarded_reasons.push_back("prose chunk without case ids");
                }
            }
            TestFile file;
            file.file_name = file_base + "1.tests";
            file.group = segment.group;
            file.content = chunks[best];
            file.case_ids = ids_of(chunks[best]);
            result.files.push_back(std::move(file));
            result.report.blocks_used = 1;
        }
    }
    if (result.files.empty()) {
        fail(ErrorCode::ExtractionEmpty,
             "no usable code block for group '" + segment.group + "'");
    }
    std::set<std::string> covered;
    for (const TestFile& file : result.files) {
        covered.insert(file.case_ids.begin(), file.case_ids.end());
    }
    std::string missing;
    for (const std::string& id : segment.case_ids) {
        if (covered.count(id) == 0) {
            if (!missing.empty()) missing += ", ";
            missing += id;
        }
    }
    if (!missing.empty()) {
        fail(ErrorCode::MissingCases,
             "segment ids absent from every extracted block: " + missing);
    }
    return result;
}

TestSuite merge_segments(const std::vector<std::vector<TestFile>>& per_segment,
                         const tsl::TslDocument& doc, const std::string& framework_key) {
    TestSuite suite;
    suite.framework_key = framework_key;
    if (doc.cases.empty()) return suite;

    std::set<std::string> doc_ids;
    for (const tsl::TslCase& c : doc.cases) doc_ids.insert(c.id);

    std::map<std::string, int> group_counters;
    std::map<std::string, std::string> claimed_by;
    std::set<std::string> used_test_names;

    for (const std::vector<TestFile>& segment_files : per_segment) {
        for (const TestFile& incoming : segment_files) {
            TestFile file = incoming;
            int index = ++group_counters[sanitize_filename(file.group)];
            file.file_name = sanitize_filename(file.group) + std::to_string(index) + ".tests";
            std::vector<std::string> kept_ids;
            for (const std::string& id : file.case_ids) {
                if (doc_ids.count(id) == 0) continue;
                auto [it, inserted] = claimed_by.emplace(id, file.file_name);
                if (!inserted) {
                    fail(ErrorCode::DuplicateCaseId,
                         "case " + id + " claimed by both " + it->second + " and " +
                             file.file_name);
                }
                kept_ids.push_back(id);
            }
            file.case_ids = std::move(kept_ids);
            for (const std::string& id : file.case_ids) {
                std::string test_name = detect_test_name(file.content, id);
                if (used_test_names.count(test_name) != 0) {
                    std::string renamed = test_name + "_" + sanitize_identifier(file.group);
                    int bump = 2;
                    while (used_test_names.count(renamed) != 0) {
                        renamed = test_name + "_" + sanitize_identifier(file.group) +
                                  std::to_string(bump++);
                    }
                    file.content = replace_word(file.content, test_name, renamed);
                    test_name = renamed;
                }
                used_test_names.insert(test_name);
                suite.manifest[id] = {file.file_name, test_name};
            }
            suite.files.push_back(std::move(file));
        }
    }

    std::string missing;
    for (const tsl::TslCase& c : doc.cases) {
        if (suite.manifest.find(c.id) == suite.manifest.end()) {
            if (!missing.empty()) missing += ", ";
            missing += c.id;
        }
    }
    if (!missing.empty()) {
        fail(ErrorCode::IncompleteSuite, "cases missing from the merged suite: " + missing);
    }
    return suite;
}

const std::string& FrameworkTemplates::line(const std::string& name) const {
    auto it = lines.find(name);
    if (it == lines.end()) {
        fail(ErrorCode::UnknownFramework,
             "framework '" + key + "' is missing line pattern '" + name + "'");
    }
    return it->second;
}

FrameworkTemplates FrameworkTemplates::load(const std::filesystem::path& templates_dir,
                                            const std::string& framework_key) {
    std::filesystem::path dir = templates_dir / "frameworks" / framework_key;
    if (!std::filesystem::is_directory(dir)) {
        fail(ErrorCode::UnknownFramework, "no templates for framework '" + framework_key + "'");
    }
    FrameworkTemplates templates;
    templates.key = framework_key;
    templates.label = read_file(dir / "label.txt");
    while (!templates.label.empty() &&
           (templates.label.back() == '\n' || templates.label.back() == '\r')) {
        templates.label.pop_back();
    }
    templates.file_template = read_file(dir / "file.tpl");
    templates.test_template = read_file(dir / "test.tpl");
    Json lines;
    try {
        lines = Json::parse(read_file(dir / "lines.json"));
    } catch (const std::exception& e) {
        fail(ErrorCode::UnknownFramework,
             "framework '" + framework_key + "' has unparsable lines.json: " + e.what());
    }
    if (!lines.is_object()) {
        fail(ErrorCode::UnknownFramework,
             "framework '" + framework_key + "' lines.json is not an object");
    }
    for (const auto& [name, value] : lines.items()) {
        if (value.is_string()) templates.lines[name] = value.get<std::string>();
    }
    return templates;
}

Json manifest_to_json(const TestSuite& suite) {
    Json manifest = Json::object();
    for (const auto& [case_id, entry] : suite.manifest) {
        manifest[case_id] = Json{{"file", entry.file_name}, {"test_name", entry.test_name}};
    }
    return manifest;
}

} // namespace resttsl::codegen
