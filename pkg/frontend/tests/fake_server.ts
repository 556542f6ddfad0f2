// In-memory stand-in for the task service, speaking the same wire contract
// (same JSON shapes, same error bodies and status codes).

import { TaskView } from '../src/api.js'

type Stored = { task: TaskView; answeredBy: Map<string, unknown> }

export class FakeServer {
  tasks = new Map<string, Stored>()
  workers = new Map<string, string>() // email -> worker_id
  failNextAnswers = 0 // simulate transient failures

  seedTasks(n: number, kind: TaskView['kind'] = 'suggestion'): void {
    for (let i = 0; i < n; i++) {
      const id = `${kind[0]}:t${String(i).padStart(3, '0')}`
      this.tasks.set(id, {
        task: {
          task_id: id,
          kind,
          post_id: `p${i}`,
          feature_id: kind === 'identification' ? null : `f${i}`,
          surface: kind === 'identification' ? null : 'Hosp.',
          post_text: `Hosp. are running short on trained doctors (${i})`,
          prompt: 'decide',
          options:
            kind === 'suggestion'
              ? ['jargon', 'abbreviation', 'misspelling', 'none']
              : kind === 'correction'
                ? ['hospital', 'hospice']
                : ['health', 'other'],
          allows_free_text: kind === 'correction',
          quorum: 3,
          state: 'open',
          answers: 0,
        },
        answeredBy: new Map(),
      })
    }
  }

  totalAnswers(): number {
    let n = 0
    this.tasks.forEach((t) => (n += t.answeredBy.size))
    return n
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input)
    const method = init?.method ?? 'GET'
    if (method === 'POST' && url.endsWith('/workers')) {
      const body = JSON.parse(String(init?.body))
      const email = String(body.email).toLowerCase()
      if (!this.workers.has(email)) this.workers.set(email, `w${this.workers.size}`)
      return json(200, { worker_id: this.workers.get(email) })
    }
    if (method === 'GET' && url.includes('/tasks/next')) {
      const params = new URL(url, 'http://x').searchParams
      const workerId = params.get('worker_id')!
      const n = Number(params.get('n') ?? 10)
      const open = [...this.tasks.values()]
        .filter((t) => t.task.state === 'open' && !t.answeredBy.has(workerId))
        .slice(0, n)
        .map((t) => ({ ...t.task, answers: t.answeredBy.size }))
      return json(200, { tasks: open, no_tasks_available: open.length === 0 })
    }
    if (method === 'POST' && url.endsWith('/answers')) {
      if (this.failNextAnswers > 0) {
        this.failNextAnswers -= 1
        return json(500, { code: 'INTERNAL', message: 'simulated outage' })
      }
      const body = JSON.parse(String(init?.body))
      const stored = this.tasks.get(body.task_id)
      if (!stored) return json(404, { code: 'UNKNOWN_TASK', message: body.task_id })
      if (stored.answeredBy.has(body.worker_id)) {
        return json(409, { code: 'DUPLICATE_ANSWER', message: 'already answered' })
      }
      if ('text' in body.choice && !stored.task.allows_free_text) {
        return json(422, { code: 'INVALID_CHOICE', message: 'no free text here' })
      }
      stored.answeredBy.set(body.worker_id, body.choice)
      return json(200, {
        task_id: body.task_id,
        counts: {},
        quorum_met: stored.answeredBy.size >= stored.task.quorum,
        resolved: false,
        winner: null,
      })
    }
    if (method === 'GET' && url.endsWith('/progress')) {
      return json(200, {
        workers: this.workers.size,
        tasks_total: this.tasks.size,
        tasks_open: this.tasks.size,
        tasks_resolved: 0,
        tasks_exhausted: 0,
        answers_total: this.totalAnswers(),
      })
    }
    return json(404, { code: 'NOT_FOUND', message: url })
  }
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json' },
  })
}
