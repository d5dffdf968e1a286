import init, { analyze_scenario, sweep, explore } from "./pkg/qif_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const $ = (id) => document.getElementById(id);

function num(s) {
  if (s === "inf") return Infinity;
  if (s === "-inf") return -Infinity;
  return Number(s);
}

function parseCsv(text) {
  const lines = text.trim().split("\n");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(",").map(num));
  return { header, rows };
}

// Draws each series against x, clipping infinities to the frame.
function plot(canvas, legend, x, series, marker) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => s.y.filter(Number.isFinite));
  let lo = Math.min(...finite, 0), hi = Math.max(...finite, 0);
  if (hi - lo < 1e-9) { lo -= 1; hi += 1; }
  const span = hi - lo;
  lo -= 0.05 * span; hi += 0.05 * span;
  const x0 = Math.min(...x), x1 = Math.max(...x);
  const sx = (v) => pad + ((v - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (v) => {
    if (v === Infinity) return pad / 2;
    if (v === -Infinity) return h - pad / 2;
    return h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);
  };

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, sy(0)); ctx.lineTo(w - pad, sy(0));
  ctx.moveTo(pad, pad / 2); ctx.lineTo(pad, h - pad / 2);
  ctx.stroke();
  ctx.fillText(hi.toFixed(2), 2, pad);
  ctx.fillText(lo.toFixed(2), 2, h - pad);
  ctx.fillText(x0.toFixed(2), pad, h - 8);
  ctx.fillText(x1.toFixed(2), w - pad - 20, h - 8);

  series.forEach((s, i) => {
    ctx.strokeStyle = s.color || COLORS[i % COLORS.length];
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.y.forEach((v, j) => {
      if (Number.isNaN(v)) return;
      const px = sx(x[j]), py = sy(v);
      if (j === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
    });
    ctx.stroke();
  });
  ctx.setLineDash([]);

  if (marker) {
    ctx.fillStyle = "#000";
    for (const y of marker.y) {
      if (!Number.isFinite(y)) continue;
      ctx.beginPath();
      ctx.arc(sx(marker.x), sy(y), 4, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  legend.innerHTML = series
    .map((s, i) => `<span style="color:${s.color || COLORS[i % COLORS.length]}">&#9472; ${s.name}</span>`)
    .join("");
}

function runAnalyze() {
  const out = $("report");
  try {
    const result = JSON.parse(analyze_scenario($("program").value, $("scenario").value));
    const warnings = result.warnings.map((w) => `warning: ${w}\n`).join("");
    out.className = "";
    out.textContent = warnings + result.text;
  } catch (e) {
    out.className = "error";
    out.textContent = String(e);
  }
}

function runSweep() {
  $("sweep-error").textContent = "";
  try {
    const { header, rows } = parseCsv(sweep($("kind").value, Number($("steps").value)));
    const x = rows.map((r) => r[0]);
    const series = header.slice(1).map((name, i) => ({
      name,
      y: rows.map((r) => r[i + 1]),
      dash: name.includes("eta") ? [4, 4] : [],
    }));
    plot($("sweep-canvas"), $("sweep-legend"), x, series);
  } catch (e) {
    $("sweep-error").textContent = String(e);
  }
}

function runExplore() {
  const pre = Number($("pre").value), post = Number($("post").value);
  const eta = Math.log2(Math.max(2, Number($("n").value)));
  $("pre-v").textContent = pre.toFixed(3);
  $("post-v").textContent = post.toFixed(3);
  let current;
  try {
    current = JSON.parse(explore(pre, post, eta));
  } catch (e) {
    $("explore-out").textContent = String(e);
    return;
  }
  $("explore-out").textContent = JSON.stringify(current, null, 2);

  const grid = Array.from({ length: 201 }, (_, i) => i / 200);
  const pts = grid.map((p) => JSON.parse(explore(pre, p, eta)));
  const asNum = (v) => (v === null ? NaN : num(String(v)));
  plot(
    $("explore-canvas"),
    $("explore-legend"),
    grid,
    [
      { name: "Q", y: pts.map((r) => asNum(r.q)) },
      { name: "Q''", y: pts.map((r) => r.q_double_prime) },
      { name: "eta", y: grid.map(() => eta), dash: [4, 4], color: "#888" },
      { name: "-eta", y: grid.map(() => -eta), dash: [4, 4], color: "#bbb" },
    ],
    { x: post, y: [asNum(current.q), current.q_double_prime] },
  );
}

await init();
$("analyze").addEventListener("click", runAnalyze);
$("sweep").addEventListener("click", runSweep);
for (const id of ["pre", "post", "n"]) $(id).addEventListener("input", runExplore);
runAnalyze();
runSweep();
runExplore();
