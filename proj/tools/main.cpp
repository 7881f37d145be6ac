// simpcert command-line front-end: integrate, certify, trace, sweep.
//
// Exit codes: 0 success, 2 expression/endpoint parse error, 3 numeric or
// domain failure, 4 proof-trace failure. Output is fully deterministic:
// identical arguments produce byte-identical bytes.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simpcert/simpcert.hpp"

namespace {

using namespace simpcert;

enum class Format { Text, Csv, Json };

struct RunConfig {
    std::string expression;
    std::string a_text;
    std::string b_text;
    int panels = 1;
    int levels = 5;
    double tol = 1e-10;
    double trace_zero_tol = 1e-11;
    std::optional<double> m4;
    Format format = Format::Text;
};

// ---------------------------------------------------------- formatting --

std::string fmt17(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    if (!std::isfinite(v)) return "nan";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_str(const std::string& s) { return "\"" + json_escape(s) + "\""; }

void emit(const std::string& s) { std::fputs(s.c_str(), stdout); }

// ------------------------------------------------------------- parsing --

Expr parse_with_diagnostics(const std::string& text, const char* what) {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error in %s: %s at position %zu\n", what, e.what(),
                     e.position());
        std::fprintf(stderr, "  %s\n", text.c_str());
        std::fprintf(stderr, "  %*s^\n", static_cast<int>(e.position()), "");
        throw;
    }
}

double parse_endpoint(const std::string& text, const char* which) {
    const Expr e = parse_with_diagnostics(text, which);
    if (e.root().has_var) {
        std::fprintf(stderr, "error in %s: interval endpoints must be constant, but '%s' "
                             "uses the variable x\n",
                     which, text.c_str());
        throw ParseError("endpoint uses the variable x", 0);
    }
    return eval(e, 0.0);
}

// --------------------------------------------------------- subcommands --

void cmd_integrate(const RunConfig& cfg) {
    const Expr e = parse_with_diagnostics(cfg.expression, "expression");
    const Interval iv(parse_endpoint(cfg.a_text, "endpoint a"),
                      parse_endpoint(cfg.b_text, "endpoint b"));
    const Config num;
    const ReferenceIntegral ref = detail::expr_reference(e, iv, num);
    auto f = [&](double x) { return eval(e, x); };
    SimpsonResult result = true_error(f, iv, cfg.panels, ref);
    if (cfg.m4) result.a_priori_bound = a_priori_bound(*cfg.m4, iv, cfg.panels);

    switch (cfg.format) {
        case Format::Json:
            emit("{\"command\":\"integrate\",\"expression\":" + json_str(cfg.expression) +
                 ",\"a\":" + fmt17(iv.a()) + ",\"b\":" + fmt17(iv.b()) +
                 ",\"panels\":" + std::to_string(result.panels) +
                 ",\"approx\":" + fmt17(result.approx) +
                 ",\"reference\":" + fmt17(result.reference) +
                 ",\"reference_method\":" + json_str(to_cstring(ref.method)) +
                 ",\"reference_accuracy\":" + fmt17(ref.est_accuracy) +
                 ",\"E\":" + fmt17(result.error_E) + ",\"a_priori_bound\":" +
                 (result.a_priori_bound ? fmt17(*result.a_priori_bound) : "null") + "}\n");
            break;
        case Format::Csv:
            emit("expression,a,b,panels,approx,reference,ref_method,ref_accuracy,E,"
                 "a_priori_bound\n");
            emit("\"" + cfg.expression + "\"," + fmt17(iv.a()) + "," + fmt17(iv.b()) + "," +
                 std::to_string(result.panels) + "," + fmt17(result.approx) + "," +
                 fmt17(result.reference) + "," + to_cstring(ref.method) + "," +
                 fmt17(ref.est_accuracy) + "," + fmt17(result.error_E) + "," +
                 (result.a_priori_bound ? fmt17(*result.a_priori_bound) : "") + "\n");
            break;
        case Format::Text:
            emit("expression:  " + cfg.expression + "\n");
            emit("interval:    [" + fmt6(iv.a()) + ", " + fmt6(iv.b()) + "]\n");
            emit("panels:      " + std::to_string(result.panels) + "\n");
            emit("simpson:     " + fmt6(result.approx) + "\n");
            emit("reference:   " + fmt6(result.reference) + " (" +
                 to_cstring(ref.method) + ", est. accuracy " + fmt6(ref.est_accuracy) +
                 ")\n");
            emit("error E:     " + fmt6(result.error_E) + "\n");
            if (result.a_priori_bound)
                emit("a priori bound: " + fmt6(*result.a_priori_bound) + " (|E| " +
                     (std::abs(result.error_E) <= *result.a_priori_bound ? "<=" : ">") +
                     " bound)\n");
            break;
    }
}

std::string certificate_json(const ErrorCertificate& cert, double E) {
    return "{\"xi\":" + fmt17(cert.xi) + ",\"target\":" + fmt17(cert.target) +
           ",\"residual\":" + fmt17(cert.residual) + ",\"E\":" + fmt17(E) +
           ",\"a\":" + fmt17(cert.interval.a()) + ",\"b\":" + fmt17(cert.interval.b()) +
           ",\"degenerate\":" + (cert.degenerate ? "true" : "false");
}

void emit_certificate_text(const ErrorCertificate& cert) {
    emit("xi:          " + fmt6(cert.xi) + "\n");
    emit("target f'''': " + fmt6(cert.target) + "\n");
    emit("residual:    " + fmt6(cert.residual) + "\n");
    emit("degenerate:  " + std::string(cert.degenerate ? "yes" : "no") + "\n");
}

void cmd_certify(const RunConfig& cfg) {
    const Expr e = parse_with_diagnostics(cfg.expression, "expression");
    const Interval iv(parse_endpoint(cfg.a_text, "endpoint a"),
                      parse_endpoint(cfg.b_text, "endpoint b"));
    const Config num;

    if (cfg.panels == 1) {
        const SingleCertification out = certify_single(e, iv, cfg.tol, num);
        switch (cfg.format) {
            case Format::Json:
                emit(certificate_json(out.certificate, out.quadrature.error_E) + "}\n");
                break;
            case Format::Csv:
                emit("scope,index,a,b,xi,target,residual,degenerate,E\n");
                emit("global,0," + fmt17(iv.a()) + "," + fmt17(iv.b()) + "," +
                     fmt17(out.certificate.xi) + "," + fmt17(out.certificate.target) + "," +
                     fmt17(out.certificate.residual) + "," +
                     (out.certificate.degenerate ? "1" : "0") + "," +
                     fmt17(out.quadrature.error_E) + "\n");
                break;
            case Format::Text:
                emit("expression:  " + cfg.expression + "\n");
                emit("interval:    [" + fmt6(iv.a()) + ", " + fmt6(iv.b()) + "]\n");
                emit("E:           " + fmt6(out.quadrature.error_E) + "\n");
                emit_certificate_text(out.certificate);
                break;
        }
        return;
    }

    const CompositeCertification out = certify_composite(e, iv, cfg.panels, cfg.tol, num);
    switch (cfg.format) {
        case Format::Json: {
            std::string body =
                certificate_json(out.certificate.global, out.quadrature.error_E) +
                ",\"panels\":" + std::to_string(cfg.panels) + ",\"per_panel\":[";
            for (std::size_t i = 0; i < out.certificate.per_panel.size(); ++i) {
                if (i) body += ",";
                const ErrorCertificate& cert = out.certificate.per_panel[i];
                body += "{\"xi\":" + fmt17(cert.xi) + ",\"target\":" + fmt17(cert.target) +
                        ",\"residual\":" + fmt17(cert.residual) +
                        ",\"a\":" + fmt17(cert.interval.a()) +
                        ",\"b\":" + fmt17(cert.interval.b()) +
                        ",\"degenerate\":" + (cert.degenerate ? "true" : "false") + "}";
            }
            emit(body + "]}\n");
            break;
        }
        case Format::Csv: {
            emit("scope,index,a,b,xi,target,residual,degenerate,E\n");
            emit("global,0," + fmt17(iv.a()) + "," + fmt17(iv.b()) + "," +
                 fmt17(out.certificate.global.xi) + "," +
                 fmt17(out.certificate.global.target) + "," +
                 fmt17(out.certificate.global.residual) + "," +
                 (out.certificate.global.degenerate ? "1" : "0") + "," +
                 fmt17(out.quadrature.error_E) + "\n");
            for (std::size_t i = 0; i < out.certificate.per_panel.size(); ++i) {
                const ErrorCertificate& cert = out.certificate.per_panel[i];
                emit("panel," + std::to_string(i + 1) + "," + fmt17(cert.interval.a()) +
                     "," + fmt17(cert.interval.b()) + "," + fmt17(cert.xi) + "," +
                     fmt17(cert.target) + "," + fmt17(cert.residual) + "," +
                     (cert.degenerate ? "1" : "0") + ",\n");
            }
            break;
        }
        case Format::Text:
            emit("expression:  " + cfg.expression + "\n");
            emit("interval:    [" + fmt6(iv.a()) + ", " + fmt6(iv.b()) + "]\n");
            emit("panels:      " + std::to_string(cfg.panels) + "\n");
            emit("E:           " + fmt6(out.quadrature.error_E) + "\n");
            emit("mean target: " + fmt6(out.certificate.mean_target()) + "\n");
            emit("global xi:   " + fmt6(out.certificate.global_xi()) + "\n");
            emit("residual:    " + fmt6(out.certificate.global.residual) + "\n");
            emit("degenerate:  " +
                 std::string(out.certificate.global.degenerate ? "yes" : "no") + "\n");
            for (std::size_t i = 0; i < out.certificate.per_panel.size(); ++i) {
                const ErrorCertificate& cert = out.certificate.per_panel[i];
                emit("panel " + std::to_string(i + 1) + ": [" + fmt6(cert.interval.a()) +
                     ", " + fmt6(cert.interval.b()) + "] xi " + fmt6(cert.xi) + " target " +
                     fmt6(cert.target) + " residual " + fmt6(cert.residual) +
                     (cert.degenerate ? " (degenerate)" : "") + "\n");
            }
            break;
    }
}

void cmd_trace(const RunConfig& cfg) {
    const Expr e = parse_with_diagnostics(cfg.expression, "expression");
    const Interval iv(parse_endpoint(cfg.a_text, "endpoint a"),
                      parse_endpoint(cfg.b_text, "endpoint b"));
    Config num;
    num.phi_zero_rel = cfg.trace_zero_tol;
    const ProofTrace trace = run_trace(e, iv, num);

    switch (cfg.format) {
        case Format::Json: {
            std::string body = "{\"command\":\"trace\",\"expression\":" +
                               json_str(cfg.expression) + ",\"a\":" + fmt17(iv.a()) +
                               ",\"b\":" + fmt17(iv.b()) + ",\"E\":" + fmt17(trace.error_E) +
                               ",\"k\":" + fmt17(trace.k) +
                               ",\"lambda\":" + fmt17(trace.lambda) +
                               ",\"u\":" + fmt17(trace.u) + ",\"v\":" + fmt17(trace.v) +
                               ",\"vanishing\":[" + fmt17(trace.vanishing[0]) + "," +
                               fmt17(trace.vanishing[1]) + "," + fmt17(trace.vanishing[2]) +
                               "],\"levels\":[";
            for (std::size_t m = 0; m < 4; ++m) {
                if (m) body += ",";
                body += "[";
                for (std::size_t i = 0; i < trace.rolle_levels[m].size(); ++i) {
                    if (i) body += ",";
                    body += fmt17(trace.rolle_levels[m][i]);
                }
                body += "]";
            }
            body += "],\"xi\":" + fmt17(trace.xi) +
                    ",\"final_residual\":" + fmt17(trace.final_residual) +
                    ",\"phi_identically_zero\":" +
                    (trace.phi_identically_zero ? "true" : "false") +
                    ",\"zeros_degenerate\":" + (trace.zeros_degenerate ? "true" : "false") +
                    ",\"level_degenerate\":[";
            for (std::size_t m = 0; m < 4; ++m) {
                if (m) body += ",";
                body += trace.level_degenerate[m] ? "true" : "false";
            }
            emit(body + "]}\n");
            break;
        }
        case Format::Csv: {
            emit("step,index,value\n");
            auto row = [](const std::string& step, int index, const std::string& value) {
                emit(step + "," + std::to_string(index) + "," + value + "\n");
            };
            row("E", 0, fmt17(trace.error_E));
            row("lambda", 0, fmt17(trace.lambda));
            row("k", 0, fmt17(trace.k));
            for (int i = 0; i < 3; ++i) row("vanishing", i, fmt17(trace.vanishing[i]));
            row("u", 0, fmt17(trace.u));
            row("v", 0, fmt17(trace.v));
            for (int m = 0; m < 4; ++m)
                for (std::size_t i = 0; i < trace.rolle_levels[m].size(); ++i)
                    row("level" + std::to_string(m + 1), static_cast<int>(i),
                        fmt17(trace.rolle_levels[m][i]));
            row("xi", 0, fmt17(trace.xi));
            row("final_residual", 0, fmt17(trace.final_residual));
            row("phi_identically_zero", 0, trace.phi_identically_zero ? "1" : "0");
            row("zeros_degenerate", 0, trace.zeros_degenerate ? "1" : "0");
            for (int m = 0; m < 4; ++m)
                row("level_degenerate", m, trace.level_degenerate[m] ? "1" : "0");
            break;
        }
        case Format::Text: {
            emit("expression:  " + cfg.expression + "\n");
            emit("interval:    [" + fmt6(iv.a()) + ", " + fmt6(iv.b()) + "]  (c = " +
                 fmt6(iv.midpoint()) + ")\n");
            emit("E:           " + fmt6(trace.error_E) + "\n");
            emit("lambda:      " + fmt6(trace.lambda) + "   (E / integral of x p)\n");
            emit("k:           " + fmt6(trace.k) +
                 "   (makes the integral of phi over [a,c] vanish)\n");
            if (trace.phi_identically_zero)
                emit("note: phi identically zero; degenerate trace, witness points by "
                     "convention\n");
            emit("vanishing integrals of phi: [a,c] " + fmt6(trace.vanishing[0]) +
                 "   [c,b] " + fmt6(trace.vanishing[1]) + "   [a,b] " +
                 fmt6(trace.vanishing[2]) + "\n");
            emit("interior zeros: u = " + fmt6(trace.u) + ", v = " + fmt6(trace.v) +
                 (trace.zeros_degenerate ? "  (by convention)" : "") + "\n");
            emit("phi is zero at the five points: " + fmt6(iv.a()) + ", " + fmt6(trace.u) +
                 ", " + fmt6(iv.midpoint()) + ", " + fmt6(trace.v) + ", " + fmt6(iv.b()) +
                 "\n");
            const char* names[4] = {"phi'    ", "phi''   ", "phi'''  ", "phi'''' "};
            for (int m = 0; m < 4; ++m) {
                std::string line = std::string(names[m]) + "roots:";
                for (double r : trace.rolle_levels[m]) line += " " + fmt6(r);
                if (trace.level_degenerate[m]) line += "  (degenerate level)";
                emit(line + "\n");
            }
            emit("xi:          " + fmt6(trace.xi) + "\n");
            emit("final residual |f''''(xi) - 24 lambda|: " + fmt6(trace.final_residual) +
                 "\n");
            break;
        }
    }
}

void cmd_sweep(const RunConfig& cfg) {
    const Expr e = parse_with_diagnostics(cfg.expression, "expression");
    const Interval iv(parse_endpoint(cfg.a_text, "endpoint a"),
                      parse_endpoint(cfg.b_text, "endpoint b"));
    const Config num;
    const ReferenceIntegral ref = detail::expr_reference(e, iv, num);
    auto f = [&](double x) { return eval(e, x); };

    struct Row {
        int panels;
        double approx;
        double abs_error;
        double order;  // NaN on the first row or when not computable
    };
    std::vector<Row> rows;
    double prev_error = 0.0;
    for (int level = 0; level <= cfg.levels; ++level) {
        const int panels = 1 << level;
        const double approx = simpson_composite(f, iv, panels);
        const double abs_error = std::abs(ref.value - approx);
        double order = std::numeric_limits<double>::quiet_NaN();
        if (level > 0 && prev_error > 0.0 && abs_error > 0.0)
            order = std::log2(prev_error / abs_error);
        rows.push_back({panels, approx, abs_error, order});
        prev_error = abs_error;
    }

    switch (cfg.format) {
        case Format::Json: {
            std::string body = "{\"command\":\"sweep\",\"expression\":" +
                               json_str(cfg.expression) + ",\"a\":" + fmt17(iv.a()) +
                               ",\"b\":" + fmt17(iv.b()) + ",\"reference\":" +
                               fmt17(ref.value) + ",\"reference_method\":" +
                               json_str(to_cstring(ref.method)) + ",\"rows\":[";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i) body += ",";
                body += "{\"panels\":" + std::to_string(rows[i].panels) +
                        ",\"approx\":" + fmt17(rows[i].approx) +
                        ",\"abs_error\":" + fmt17(rows[i].abs_error) +
                        ",\"observed_order\":" +
                        (std::isfinite(rows[i].order) ? fmt17(rows[i].order) : "null") + "}";
            }
            emit(body + "]}\n");
            break;
        }
        case Format::Csv:
            emit("panels,approx,abs_error,observed_order\n");
            for (const Row& r : rows)
                emit(std::to_string(r.panels) + "," + fmt17(r.approx) + "," +
                     fmt17(r.abs_error) + "," +
                     (std::isfinite(r.order) ? fmt17(r.order) : "") + "\n");
            break;
        case Format::Text:
            emit("expression:  " + cfg.expression + "\n");
            emit("interval:    [" + fmt6(iv.a()) + ", " + fmt6(iv.b()) + "]\n");
            emit("reference:   " + fmt6(ref.value) + " (" + to_cstring(ref.method) + ")\n");
            emit("panels      approx          |E|            observed order\n");
            for (const Row& r : rows) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%-10d  %-14s  %-13s  %s\n", r.panels,
                              fmt6(r.approx).c_str(), fmt6(r.abs_error).c_str(),
                              std::isfinite(r.order) ? fmt6(r.order).c_str() : "-");
                emit(buf);
            }
            break;
    }
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"certified Simpson quadrature: integration, error certificates, and "
                 "constructive proof traces"};
    app.require_subcommand(1);

    RunConfig cfg;
    bool json = false, csv = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("expression", cfg.expression,
                        "function of x, e.g. \"exp(x)*sin(x)\"")
            ->required();
        cmd->add_option("a", cfg.a_text, "left endpoint (constant expression, pi/e ok)")
            ->required();
        cmd->add_option("b", cfg.b_text, "right endpoint (constant expression, pi/e ok)")
            ->required();
        auto* jf = cmd->add_flag("--json", json, "emit JSON");
        auto* cf = cmd->add_flag("--csv", csv, "emit CSV");
        jf->excludes(cf);
        cf->excludes(jf);
    };

    CLI::App* integrate = app.add_subcommand("integrate", "composite Simpson value, "
                                                          "reference integral and true error");
    add_common(integrate);
    integrate->add_option("--panels", cfg.panels, "number of Simpson panels")
        ->check(CLI::Range(1, 1 << 20));
    double m4_value = 0.0;
    CLI::Option* m4_opt =
        integrate->add_option("--m4", m4_value, "bound on |f''''| for the a-priori bound");

    CLI::App* certify = app.add_subcommand("certify", "locate the mean-value point xi with "
                                                      "f''''(xi) = -2880 E/(b-a)^5");
    add_common(certify);
    certify->add_option("--panels", cfg.panels, "panels (per-panel + global certificates)")
        ->check(CLI::Range(1, 4096));
    certify->add_option("--tol", cfg.tol, "certificate residual tolerance scale")
        ->check(CLI::PositiveNumber);

    CLI::App* trace = app.add_subcommand("trace", "replay the auxiliary-function proof: "
                                                  "phi, k, vanishing integrals, Rolle cascade");
    add_common(trace);
    trace->add_option("--tol", cfg.trace_zero_tol,
                      "relative threshold for treating phi (or a derivative) as zero")
        ->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand("sweep", "panel-doubling convergence table");
    add_common(sweep);
    sweep->add_option("--levels", cfg.levels, "sweep panels 1,2,4,...,2^levels")
        ->check(CLI::Range(0, 20));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    cfg.format = json ? Format::Json : (csv ? Format::Csv : Format::Text);
    if (m4_opt->count() > 0) cfg.m4 = m4_value;

    try {
        if (integrate->parsed()) cmd_integrate(cfg);
        else if (certify->parsed()) cmd_certify(cfg);
        else if (trace->parsed()) cmd_trace(cfg);
        else if (sweep->parsed()) cmd_sweep(cfg);
    } catch (const ParseError&) {
        // diagnostics already printed with a caret
        return 2;
    } catch (const TraceError& e) {
        std::fprintf(stderr, "trace failure: %s\n", e.what());
        return 4;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 3;
    }
    return 0;
}
