import init, { magnus_expansion, membership, massey_pairing } from "./pkg/filtrate_wasm.js";

const $ = (id) => document.getElementById(id);

function esc(s) {
  return String(s).replace(/[&<>]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;" })[c]);
}

function bind(formId, outId, compute, render) {
  const form = $(formId);
  const out = $(outId);
  const go = (ev) => {
    ev?.preventDefault();
    const data = Object.fromEntries(new FormData(form));
    try {
      out.className = "";
      out.innerHTML = render(JSON.parse(compute(data)));
    } catch (err) {
      out.className = "err";
      out.textContent = err.message ?? String(err);
    }
  };
  form.addEventListener("submit", go);
  go();
}

function renderSeries(v) {
  const terms = v.series.terms
    .map((t) => `${t.coeff} ${t.word === "e" ? "" : "·" + t.word}`)
    .join("\n");
  return `word  ${esc(v.word)}\nring  ${esc(v.series.ring)}, degrees ≤ ${v.series.cap}\n\n${esc(terms)}`;
}

function renderWitness(w) {
  if (!w) return "—";
  const c = w.coefficient === undefined ? "" : `, coefficient ${w.coefficient}`;
  return `degree ${w.degree}, word ${w.word}${c}`;
}

function renderMember(v) {
  const verdict = v.member ? '<span class="yes">member</span>' : '<span class="no">not a member</span>';
  const rows = v.rows.map((r, i) => `e(${i + 1},·) = (${r.join(", ")})`).join("\n");
  return (
    `${esc(v.word)} at level ${v.level} of ${esc(v.emap)}: ${verdict}\n\n` +
    `series route   ${v.series.member}   witness ${esc(renderWitness(v.series.witness))}\n` +
    `kernel route   ${v.kernels.member}   witness ${esc(renderWitness(v.kernels.witness))}\n\n` +
    esc(rows)
  );
}

function renderMassey(v) {
  const m = v.matrix;
  const head = "<tr><th></th>" + m.cols.map((c) => `<th>${esc(c)}</th>`).join("") + "</tr>";
  const body = m.entries
    .map((row, i) => `<tr><th>${esc(m.rows[i])}</th>` + row.map((x) => `<td>${x === "0" ? "·" : esc(x)}</td>`).join("") + "</tr>")
    .join("");
  const ok = String(v.rank) === v.necklace ? "yes" : "no";
  return (
    `rank ${v.rank}, necklace count ${v.necklace} <span class="${ok}">${ok === "yes" ? "equal" : "differ"}</span>` +
    `<div class="scroll"><table>${head}${body}</table></div>`
  );
}

await init();
bind("magnus-form", "magnus-out", (d) => magnus_expansion(d.word, d.ring, Number(d.cap)), renderSeries);
bind("member-form", "member-out", (d) => membership(d.word, d.emap, Number(d.level)), renderMember);
bind("massey-form", "massey-out", (d) => massey_pairing(Number(d.alphabet), Number(d.level)), renderMassey);
