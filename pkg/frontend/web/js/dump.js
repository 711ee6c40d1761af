/** Parser for the `state` command's dump: five "%"-headed sections in a
 * fixed order, each header carrying its line count. Returns null when the
 * text does not parse, so callers can fall back to showing it raw. */
const SECTION_ORDER = ["rules", "inputs", "assumptions", "show", "released"];
const HEADER = /^% (rules|inputs|assumptions|show|released) \((\d+)\)$/;
const INPUT_LINE = /^(.+) = ([tuf])$/;
const ASSUMPTION_LINE = /^(.+) = ([tf])$/;
export function parseStateDump(text) {
    const sections = new Map();
    const declared = new Map();
    let current = null;
    for (const line of text.split("\n")) {
        const header = HEADER.exec(line);
        if (header !== null) {
            const name = header[1];
            if (sections.has(name))
                return null;
            current = [];
            sections.set(name, current);
            declared.set(name, Number(header[2]));
            continue;
        }
        if (current === null)
            return null;
        current.push(line);
    }
    for (const name of SECTION_ORDER) {
        const lines = sections.get(name);
        if (lines === undefined || lines.length !== declared.get(name))
            return null;
    }
    const inputs = [];
    for (const line of sections.get("inputs")) {
        const m = INPUT_LINE.exec(line);
        if (m === null)
            return null;
        inputs.push({ atom: m[1], value: m[2] });
    }
    const assumptions = [];
    for (const line of sections.get("assumptions")) {
        const m = ASSUMPTION_LINE.exec(line);
        if (m === null)
            return null;
        assumptions.push({ atom: m[1], value: m[2] });
    }
    return {
        rules: sections.get("rules"),
        inputs,
        assumptions,
        shows: sections.get("show"),
        released: sections.get("released"),
    };
}
/** Dumps open with the rules header; cheap pre-check before parsing. */
export function looksLikeStateDump(text) {
    return /^% rules \(\d+\)/.test(text);
}
