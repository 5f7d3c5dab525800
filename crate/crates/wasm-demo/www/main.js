import init, {
  fixture_names,
  t_family,
  counterexample_curves,
  commutant_dim,
  rn_explore,
} from "./pkg/acp_demo.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function axes(ctx, w, h, xr, yr) {
  const pad = 36;
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(sx(xr[0]), sy(0));
  ctx.lineTo(sx(xr[1]), sy(0));
  ctx.stroke();
  ctx.fillText(xr[0].toFixed(2), sx(xr[0]), h - 16);
  ctx.fillText(xr[1].toFixed(2), sx(xr[1]) - 24, h - 16);
  ctx.fillText(yr[1].toFixed(2), 2, sy(yr[1]) + 4);
  ctx.fillText(yr[0].toFixed(2), 2, sy(yr[0]) + 4);
  return { sx, sy };
}

function drawFamily() {
  const inv = $("fam-inv").checked;
  let lo = parseFloat($("fam-min").value);
  let hi = parseFloat($("fam-max").value);
  if (!(hi > lo)) hi = lo + 1;
  const data = JSON.parse(t_family(inv, lo, hi, 240)).points;
  const canvas = $("fam-plot");
  const ctx = canvas.getContext("2d");
  const all = data.flatMap((p) => p.eigenvalues);
  const yr = [Math.min(0, ...all), Math.max(0, ...all)];
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, [lo, hi], yr);
  const step = sx(data[1].t) - sx(data[0].t);
  ctx.fillStyle = "rgba(44,160,44,0.15)";
  for (const p of data) if (p.acp) ctx.fillRect(sx(p.t) - step / 2, sy(yr[1]), step, sy(yr[0]) - sy(yr[1]));
  for (let k = 0; k < 3; k++) {
    ctx.strokeStyle = COLORS[k];
    ctx.beginPath();
    data.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, sx(p.t), sy(p.eigenvalues[k])));
    ctx.stroke();
  }
}

function drawCounterexample() {
  const r = parseInt($("ce-range").value, 10);
  $("ce-range-val").textContent = r;
  const pts = JSON.parse(counterexample_curves(r)).points;
  const canvas = $("ce-plot");
  const ctx = canvas.getContext("2d");
  const logs = pts.map((p) => Math.log10(1 + p.gap));
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, [-r - 0.5, r + 0.5], [0, Math.max(...logs)]);
  ctx.fillStyle = COLORS[1];
  pts.forEach((p, i) => ctx.fillRect(sx(p.n) - 8, sy(logs[i]), 16, sy(0) - sy(logs[i])));
  ctx.fillStyle = "#444";
  ctx.fillText("log10(1 + gap)", 40, 14);
  $("ce-table").textContent = pts
    .map((p) => `n=${String(p.n).padStart(3)}  phi(n)=${JSON.stringify(p.phi.map((row) => row.map((x) => +x.toFixed(4))))}  gap=${p.gap.toFixed(6)}`)
    .join("\n");
}

function setupWeights() {
  const info = JSON.parse(commutant_dim($("rn-fixture").value));
  const box = $("rn-weights");
  box.innerHTML = "";
  if (info.error) {
    box.textContent = info.error;
    return;
  }
  for (let k = 0; k < info.dim; k++) {
    const label = document.createElement("label");
    label.innerHTML = `w<sub>${k}</sub> <input type="range" min="0" max="2" step="0.01" value="${(k % 3) * 0.5}"> <span></span>`;
    box.appendChild(label);
  }
  box.querySelectorAll("input").forEach((el) => el.addEventListener("input", runRn));
  runRn();
}

function runRn() {
  const inputs = [...$("rn-weights").querySelectorAll("input")];
  inputs.forEach((el) => (el.nextElementSibling.textContent = (+el.value).toFixed(2)));
  const shift = parseFloat($("rn-shift").value);
  $("rn-shift-val").textContent = shift.toFixed(2);
  const weights = new Float64Array(inputs.map((el) => +el.value));
  const out = JSON.parse(rn_explore($("rn-fixture").value, weights, shift));
  $("rn-out").textContent = JSON.stringify(out, null, 2);
}

async function main() {
  await init();
  for (const name of JSON.parse(fixture_names())) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = name;
    $("rn-fixture").appendChild(opt);
  }
  $("rn-fixture").value = "z3_regular";
  ["fam-inv", "fam-min", "fam-max"].forEach((id) => $(id).addEventListener("input", drawFamily));
  $("ce-range").addEventListener("input", drawCounterexample);
  $("rn-fixture").addEventListener("change", setupWeights);
  $("rn-shift").addEventListener("input", runRn);
  drawFamily();
  drawCounterexample();
  setupWeights();
}

main();
