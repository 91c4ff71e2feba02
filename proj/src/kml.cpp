#include "routecheck/kml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "routecheck/errors.hpp"

namespace routecheck {

namespace {

// --- minimal XML DOM ----------------------------------------------------------
//
// Enough XML for the KML subset: elements, attributes, text, comments, CDATA,
// the five predefined entities and numeric character references. Namespace
// prefixes are stripped so <kml:LineString> and <LineString> match.

struct XmlNode {
    std::string name;  // local name, prefix stripped
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlNode> children;
    std::string text;  // concatenated direct text content

    const XmlNode* child(std::string_view local_name) const {
        for (const XmlNode& c : children) {
            if (c.name == local_name) return &c;
        }
        return nullptr;
    }
    const std::string* attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

class XmlParser {
public:
    explicit XmlParser(std::string_view text) : s_(text) {}

    XmlNode parse_document() {
        skip_misc();
        if (eof()) fail("document has no root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("trailing content after root element");
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    char get() {
        const char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, "kml line " + std::to_string(line_));
    }

    bool starts_with(std::string_view prefix) const {
        return s_.substr(pos_, prefix.size()) == prefix;
    }

    void consume(std::string_view token, const char* what) {
        if (!starts_with(token)) fail(std::string("expected ") + what);
        for (std::size_t i = 0; i < token.size(); ++i) get();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }

    void skip_until(std::string_view terminator, const char* what) {
        while (!eof()) {
            if (starts_with(terminator)) {
                consume(terminator, what);
                return;
            }
            get();
        }
        fail(std::string("unterminated ") + what);
    }

    // Prolog, comments, processing instructions, DOCTYPE, whitespace.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<!")) {
                skip_until(">", "declaration");
            } else {
                return;
            }
        }
    }

    static std::string strip_prefix(const std::string& qname) {
        const std::size_t colon = qname.find(':');
        return colon == std::string::npos ? qname : qname.substr(colon + 1);
    }

    std::string read_name() {
        std::string name;
        while (!eof()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/' || c == '=') {
                break;
            }
            name += get();
        }
        if (name.empty()) fail("empty element or attribute name");
        return name;
    }

    std::string decode_entity() {
        consume("&", "entity");
        std::string ent;
        while (!eof() && peek() != ';') ent += get();
        if (eof()) fail("unterminated entity reference");
        get();  // ';'
        if (ent == "amp") return "&";
        if (ent == "lt") return "<";
        if (ent == "gt") return ">";
        if (ent == "quot") return "\"";
        if (ent == "apos") return "'";
        if (ent.size() > 1 && ent[0] == '#') {
            const bool hex = ent[1] == 'x' || ent[1] == 'X';
            unsigned long code = 0;
            const char* first = ent.data() + (hex ? 2 : 1);
            const char* last = ent.data() + ent.size();
            const auto [p, ec] = std::from_chars(first, last, code, hex ? 16 : 10);
            if (ec != std::errc{} || p != last || code == 0 || code > 0x10FFFF) {
                fail("bad character reference &" + ent + ";");
            }
            // UTF-8 encode.
            std::string out;
            if (code < 0x80) {
                out += static_cast<char>(code);
            } else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else if (code < 0x10000) {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (code >> 18));
                out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
            return out;
        }
        fail("unknown entity &" + ent + ";");
    }

    std::string read_attribute_value() {
        skip_ws();
        consume("=", "'=' after attribute name");
        skip_ws();
        if (eof() || (peek() != '"' && peek() != '\'')) fail("attribute value must be quoted");
        const char quote = get();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '&') {
                value += decode_entity();
            } else {
                value += get();
            }
        }
        if (eof()) fail("unterminated attribute value");
        get();  // closing quote
        return value;
    }

    XmlNode parse_element() {
        consume("<", "element start");
        XmlNode node;
        node.name = strip_prefix(read_name());
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag <" + node.name + ">");
            if (starts_with("/>")) {
                consume("/>", "tag end");
                return node;
            }
            if (peek() == '>') {
                get();
                break;
            }
            std::string key = strip_prefix(read_name());
            node.attributes.emplace_back(std::move(key), read_attribute_value());
        }
        // Content until the matching end tag.
        for (;;) {
            if (eof()) fail("missing end tag </" + node.name + ">");
            if (starts_with("<![CDATA[")) {
                consume("<![CDATA[", "CDATA");
                const std::size_t end = s_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA section");
                while (pos_ < end) node.text += get();
                consume("]]>", "CDATA end");
            } else if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("</")) {
                consume("</", "end tag");
                const std::string name = strip_prefix(read_name());
                if (name != node.name) {
                    fail("mismatched end tag </" + name + "> for <" + node.name + ">");
                }
                skip_ws();
                consume(">", "'>'");
                return node;
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (peek() == '<') {
                node.children.push_back(parse_element());
            } else if (peek() == '&') {
                node.text += decode_entity();
            } else {
                node.text += get();
            }
        }
    }
};

// --- KML extraction -----------------------------------------------------------

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct LineStringRun {
    std::vector<GeoPoint> points;
    Mode mode = Mode::Rail;
    std::string path;
};

double parse_coord(std::string_view tok, const std::string& where) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("bad coordinate value '" + std::string(tok) + "'", where);
    }
    return v;
}

std::vector<GeoPoint> parse_coordinates(const std::string& text, const std::string& path) {
    std::vector<GeoPoint> pts;
    std::istringstream in(text);
    std::string tuple;
    std::size_t index = 0;
    while (in >> tuple) {
        const std::string where = path + " tuple " + std::to_string(index);
        std::vector<std::string_view> fields;
        std::string_view rest = tuple;
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (fields.size() < 2 || fields.size() > 3) {
            throw ParseError("coordinate tuple must be lon,lat[,alt], got '" + tuple + "'", where);
        }
        GeoPoint p;
        p.lon = parse_coord(fields[0], where);
        p.lat = parse_coord(fields[1], where);
        if (fields.size() == 3) parse_coord(fields[2], where);  // altitude checked, dropped
        if (!is_valid(p)) {
            throw std::domain_error(where + ": lon/lat out of range in '" + tuple + "'");
        }
        pts.push_back(p);
        ++index;
    }
    return pts;
}

// Depth-first, document-order collection of LineStrings; the nearest
// enclosing Placemark's recognized name supplies the mode.
void collect_linestrings(const XmlNode& node, Mode inherited_mode, const std::string& path,
                         std::vector<LineStringRun>& out) {
    Mode mode = inherited_mode;
    if (node.name == "Placemark") {
        if (const XmlNode* name = node.child("name")) {
            if (const auto m = mode_from_name(trim(name->text))) mode = *m;
        }
    }
    if (node.name == "LineString") {
        const XmlNode* coords = node.child("coordinates");
        if (coords == nullptr) {
            throw ParseError("LineString without coordinates", path);
        }
        LineStringRun run;
        run.path = path + "/coordinates";
        run.points = parse_coordinates(coords->text, run.path);
        run.mode = mode;
        if (run.points.size() < 2) {
            throw ParseError("LineString has fewer than 2 coordinates", run.path);
        }
        out.push_back(std::move(run));
        return;
    }
    std::size_t ordinal = 0;
    for (const XmlNode& c : node.children) {
        collect_linestrings(c, mode, path + "/" + c.name + "[" + std::to_string(ordinal) + "]",
                            out);
        ++ordinal;
    }
}

const XmlNode* find_first(const XmlNode& node, std::string_view name) {
    if (node.name == name) return &node;
    for (const XmlNode& c : node.children) {
        if (const XmlNode* hit = find_first(c, name)) return hit;
    }
    return nullptr;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

}  // namespace

RouteDocument parse_kml(std::string_view text) {
    XmlParser parser(text);
    const XmlNode root = parser.parse_document();

    RouteDocument doc;
    if (const XmlNode* document = find_first(root, "Document")) {
        if (const XmlNode* name = document->child("name")) {
            doc.id = trim(name->text);
        }
        if (const XmlNode* ext = document->child("ExtendedData")) {
            for (const XmlNode& data : ext->children) {
                if (data.name != "Data") continue;
                const std::string* key = data.attribute("name");
                const XmlNode* value = data.child("value");
                if (key != nullptr && value != nullptr) {
                    doc.metadata[*key] = trim(value->text);
                }
            }
        }
    }

    std::vector<LineStringRun> runs;
    collect_linestrings(root, Mode::Rail, root.name, runs);
    if (runs.empty()) {
        throw ParseError("no LineString element found", "kml");
    }

    for (const LineStringRun& run : runs) {
        auto& verts = doc.route.vertices;
        auto& modes = doc.route.segment_modes;
        // A run starting exactly on the previous run's end vertex shares the
        // junction; otherwise the joining segment takes this run's mode.
        std::size_t start = 0;
        if (!verts.empty() && run.points.front() == verts.back()) start = 1;
        for (std::size_t i = start; i < run.points.size(); ++i) {
            verts.push_back(run.points[i]);
            if (verts.size() >= 2) modes.push_back(run.mode);
        }
    }
    return doc;
}

RouteDocument parse_kml_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open KML file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kml(buf.str());
}

std::string serialize_kml(const RouteDocument& doc) {
    if (doc.route.vertices.size() < 2) {
        throw std::invalid_argument("serialize_kml: route needs at least 2 vertices");
    }
    if (doc.route.segment_modes.size() != doc.route.vertices.size() - 1) {
        throw std::invalid_argument("serialize_kml: mode list does not match vertices");
    }

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n";
    out += "  <Document>\n";
    if (!doc.id.empty()) {
        out += "    <name>" + xml_escape(doc.id) + "</name>\n";
    }
    if (!doc.metadata.empty()) {
        out += "    <ExtendedData>\n";
        for (const auto& [key, value] : doc.metadata) {
            out += "      <Data name=\"" + xml_escape(key) + "\"><value>" + xml_escape(value) +
                   "</value></Data>\n";
        }
        out += "    </ExtendedData>\n";
    }

    // One Placemark per contiguous mode run; junction vertices appear in both
    // neighbouring runs so parsing stitches them back without duplicates.
    std::size_t start = 0;
    const auto& modes = doc.route.segment_modes;
    for (std::size_t i = 1; i <= modes.size(); ++i) {
        if (i != modes.size() && modes[i] == modes[start]) continue;
        out += "    <Placemark>\n";
        out += "      <name>";
        out += mode_name(modes[start]);
        out += "</name>\n";
        out += "      <LineString>\n        <coordinates>\n";
        for (std::size_t v = start; v <= i; ++v) {
            out += "          " + format_coord(doc.route.vertices[v].lon) + "," +
                   format_coord(doc.route.vertices[v].lat) + "\n";
        }
        out += "        </coordinates>\n      </LineString>\n    </Placemark>\n";
        start = i;
    }
    out += "  </Document>\n</kml>\n";
    return out;
}

void write_kml_file(const RouteDocument& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write KML file", path.string());
    out << serialize_kml(doc);
}

}  // namespace routecheck
